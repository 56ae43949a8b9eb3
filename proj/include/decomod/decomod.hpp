#pragma once

#include "chordal.hpp"
#include "classify.hpp"
#include "common.hpp"
#include "criteria.hpp"
#include "estimate.hpp"
#include "experiment.hpp"
#include "rng.hpp"
#include "schema.hpp"
#include "search.hpp"
#include "synthetic.hpp"
