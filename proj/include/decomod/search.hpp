#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "chordal.hpp"
#include "common.hpp"
#include "criteria.hpp"
#include "estimate.hpp"
#include "schema.hpp"

namespace decomod {

enum class SearchDirection { forward, backward };

struct SearchConfig {
    SearchDirection direction = SearchDirection::forward;
    CriterionConfig criterion;
    // Swaps the p-value comparison directions: forward accepts the LARGEST p
    // while p > alpha, backward the SMALLEST while p < alpha. Off by default;
    // the default rule treats small p as evidence the edge matters.
    bool literal_alpha_rule = false;
    // Negative means the lattice height n(n-1)/2, which never binds.
    long long max_steps = -1;
};

struct SearchStep {
    int level = 0;                       // edge count of chosen_model
    std::optional<Edge> chosen_edge;     // empty for the start row
    ModelGraph chosen_model;
    double criterion_value = std::numeric_limits<double>::quiet_NaN();
    int candidates_evaluated = 0;
};

enum class StopReason { boundary, no_candidates, criterion_rejected, max_steps };

struct StopInfo {
    StopReason reason = StopReason::boundary;
    // The frontier the stopping rule turned down, when reason is
    // criterion_rejected: the best-scoring candidate and its value.
    std::optional<Edge> best_rejected;
    double best_rejected_value = std::numeric_limits<double>::quiet_NaN();
    int final_candidates = 0;
    long long total_candidates = 0;
};

struct SearchResult {
    ModelGraph final_model;
    std::vector<SearchStep> trace;       // trace[0] is the start model
    std::vector<int> selected_features;  // features adjacent to the class
    StopInfo stop;
};

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::boundary: return "boundary";
        case StopReason::no_candidates: return "no_candidates";
        case StopReason::criterion_rejected: return "criterion_rejected";
        case StopReason::max_steps: return "max_steps";
    }
    return "unknown";
}

inline std::vector<int> features_adjacent_to_class(const ModelGraph& g, const Schema& schema) {
    const int cls = schema.class_index();
    std::vector<int> out;
    for (int i = 0; i < cls; ++i) {
        if (has_edge(g, i, cls)) out.push_back(i);
    }
    return out;
}

struct FeatureReport {
    std::vector<int> retained;
    std::vector<int> dropped;
};

inline FeatureReport feature_report(const SearchResult& result, const Schema& schema) {
    FeatureReport r;
    r.retained = features_adjacent_to_class(result.final_model, schema);
    std::size_t k = 0;
    for (int i = 0; i < schema.class_index(); ++i) {
        if (k < r.retained.size() && r.retained[k] == i) {
            ++k;
        } else {
            r.dropped.push_back(i);
        }
    }
    return r;
}

// Greedy sequential selection over decomposable models. Forward search grows
// from independence, backward search shrinks from the saturated model; at
// each level every decomposable one-edge neighbor is scored on the nested
// difference against the current model and the extremal candidate is taken
// while the criterion allows, ties going to the first edge in canonical
// order. Information criteria accept on ic >= 0 forward / ic <= 0 backward;
// significance criteria accept forward on p < alpha (smallest p first) and
// backward on p >= alpha (largest p first) unless literal_alpha_rule flips
// the comparisons. Candidate evaluation order never affects the outcome.
inline SearchResult select_model(const Dataset& train, const SearchConfig& config) {
    validate_criterion_config(config.criterion);
    const int n = train.schema.arity();
    const bool forward = config.direction == SearchDirection::forward;
    const long long lattice = static_cast<long long>(n) * (n - 1) / 2;
    const long long max_steps = config.max_steps < 0 ? lattice : config.max_steps;

    const CriterionKind kind = config.criterion.kind;
    const bool is_ic = kind == CriterionKind::aic || kind == CriterionKind::bic;
    const double kappa = kind == CriterionKind::aic
                             ? 2.0
                             : std::log(static_cast<double>(train.total));
    // Prefer-larger scores: forward IC steps maximize, backward minimize;
    // default p-value rule minimizes forward and maximizes backward, and the
    // literal rule flips that.
    const bool prefer_larger = is_ic ? forward : (config.literal_alpha_rule ? forward : !forward);

    SearchResult result;
    ModelGraph current =
        boundary_graph(n, forward ? BoundaryKind::independence : BoundaryKind::saturated);
    result.trace.push_back(SearchStep{complexity(current), std::nullopt, current,
                                      std::numeric_limits<double>::quiet_NaN(), 0});

    for (long long step = 0;; ++step) {
        auto neighbors = enumerate_neighbors(
            current, forward ? NeighborDirection::add : NeighborDirection::remove);
        if (neighbors.empty()) {
            const ModelGraph end = boundary_graph(
                n, forward ? BoundaryKind::saturated : BoundaryKind::independence);
            result.stop.reason = current == end ? StopReason::boundary : StopReason::no_candidates;
            break;
        }
        if (step >= max_steps) {
            result.stop.reason = StopReason::max_steps;
            break;
        }

        std::size_t best = 0;
        double best_value = 0.0;
        for (std::size_t i = 0; i < neighbors.size(); ++i) {
            const Edge e = neighbors[i].first;
            const ModelGraph& complex_graph = forward ? neighbors[i].second : current;
            detail::LocalTables lt = detail::build_local_tables(train, complex_graph, e);
            double value;
            switch (kind) {
                case CriterionKind::aic:
                case CriterionKind::bic:
                    value = information_criterion(lt.observed, kappa);
                    break;
                case CriterionKind::chi2:
                    value = chi2_significance(lt.observed);
                    break;
                case CriterionKind::exact:
                    value = detail::mc_significance(lt, config.criterion.mc_replicates,
                                                    config.criterion.seed);
                    break;
                default:
                    throw config_error("unknown criterion kind");
            }
            if (i == 0 || (prefer_larger ? value > best_value : value < best_value)) {
                best = i;
                best_value = value;
            }
        }
        result.stop.total_candidates += static_cast<long long>(neighbors.size());

        bool accept;
        if (is_ic) {
            accept = forward ? best_value >= 0.0 : best_value <= 0.0;
        } else if (config.literal_alpha_rule) {
            accept = forward ? best_value > config.criterion.alpha
                             : best_value < config.criterion.alpha;
        } else {
            accept = forward ? best_value < config.criterion.alpha
                             : best_value >= config.criterion.alpha;
        }
        if (!accept) {
            result.stop.reason = StopReason::criterion_rejected;
            result.stop.best_rejected = neighbors[best].first;
            result.stop.best_rejected_value = best_value;
            result.stop.final_candidates = static_cast<int>(neighbors.size());
            break;
        }

        current = std::move(neighbors[best].second);
        result.trace.push_back(SearchStep{complexity(current), neighbors[best].first, current,
                                          best_value, static_cast<int>(neighbors.size())});
    }

    result.final_model = current;
    result.selected_features = features_adjacent_to_class(current, train.schema);
    return result;
}

}  // namespace decomod
