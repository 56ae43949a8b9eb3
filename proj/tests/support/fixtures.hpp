#pragma once

// Synthetic generating models shared by the search tests and the acceptance
// runner.

#include <decomod/decomod.hpp>

#include "oracles.hpp"

namespace fixtures {

using namespace decomod;

// Ground-truth model (F1 S)(F2 F3 S) over four binary variables with strong
// coupling everywhere, so the three class edges and the F2-F3 edge carry
// overwhelming signal while F1 stays conditionally independent of F2 and F3.
// Used for the forward-search recovery checks.
inline SyntheticModel recovery_model(const Schema& schema) {
    const std::vector<std::string> names = schema.variable_names();
    const ModelGraph graph = parse_model("(F1 S)(F2 F3 S)", names);

    // Decomposition order: clique {F1,S} first (separator empty), then
    // {F2,F3,S} with separator {S}. Tables are dense over clique members
    // ascending, last member fastest.
    const std::vector<double> f1_s{
        // (F1, S): p(F1,S) with p(S)=1/2, p(F1=S's side)=0.85
        0.425, 0.075,   // F1=0: S=0, S=1
        0.075, 0.425,   // F1=1
    };
    // The off-diagonal mass balances two competing needs: F2 and F3 must be
    // correlated enough given S that the two possible spurious additions at
    // the recovered model's frontier see nearly identical data (so they
    // succeed or fail together), yet each must keep enough conditional
    // signal about S that the second class edge clears the selection
    // threshold. Measured over 400 sampling seeds at N=5000, forward search
    // with the dimension-penalized criterion recovers the generating edge
    // set exactly in 343/400 = 85.8% of runs (seeds 1..20: 17/20), at the
    // theoretical ceiling set by the two residual candidates' type-I rate.
    const std::vector<double> f2_f3_s{
        // (F2, F3, S): slices over S are conditionals p(F2,F3 | S)
        0.680, 0.290,   // F2=0 F3=0 : S=0, S=1
        0.015, 0.015,   // F2=0 F3=1
        0.015, 0.015,   // F2=1 F3=0
        0.290, 0.680,   // F2=1 F3=1
    };
    return make_synthetic_model(schema, graph, {f1_s, f2_f3_s});
}

inline Schema recovery_schema() { return oracles::make_schema({2, 2, 2}, 2); }

// A nine-variable schema shaped like a word-sense task: one part-of-speech
// style binary variable, four high-cardinality context-word variables, three
// binary collocations, and a six-way class.
inline Schema wide_schema() {
    Schema schema;
    const char* feature_names[8] = {"E", "L1", "L2", "R1", "R2", "C1", "C2", "C3"};
    const int feature_levels[8] = {2, 25, 25, 25, 25, 2, 2, 2};
    for (int i = 0; i < 8; ++i) {
        FeatureVariable var;
        var.name = feature_names[i];
        for (int v = 0; v < feature_levels[i]; ++v) var.levels.push_back(std::to_string(v));
        schema.features.push_back(std::move(var));
    }
    schema.class_var.name = "S";
    for (int v = 0; v < 6; ++v) schema.class_var.levels.push_back(std::to_string(v));
    return schema;
}

// Generating model for the wide schema: every feature tied to the class plus
// two feature-feature interactions, with random conditional tables.
inline SyntheticModel wide_model(std::uint64_t seed) {
    const Schema schema = wide_schema();
    ModelGraph g = naive_bayes_graph(schema);
    g = with_edge(g, make_edge(1, 2));  // L1 - L2
    g = with_edge(g, make_edge(0, 5));  // E - C1
    return make_synthetic_model(schema, g, seed);
}

}  // namespace fixtures
