#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chordal.hpp"
#include "common.hpp"
#include "schema.hpp"

namespace decomod {

// Sparse contingency table over a subset of variables. Cells are keyed by a
// mixed-radix code over the (ascending) member variables; only observed cells
// are stored, so the full joint space is never materialized.
struct MarginalTable {
    std::vector<int> vars;               // ascending schema indices
    std::vector<std::uint64_t> strides;  // per var, last member varies fastest
    std::vector<std::pair<std::uint64_t, long long>> cells;  // sorted by code
    long long total = 0;

    std::uint64_t encode(std::span<const int> instance) const {
        std::uint64_t code = 0;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            code += strides[k] * static_cast<std::uint64_t>(
                                     instance[static_cast<std::size_t>(vars[k])]);
        }
        return code;
    }

    long long count(std::uint64_t code) const {
        auto it = std::lower_bound(cells.begin(), cells.end(), code,
                                   [](const auto& cell, std::uint64_t c) { return cell.first < c; });
        return (it != cells.end() && it->first == code) ? it->second : 0;
    }

    long long positive_cells() const { return static_cast<long long>(cells.size()); }
};

// Tallies the marginal table for `vars` (ascending) from the dataset.
// An empty variable list yields the single empty cell with count N, which is
// how empty separators act as probability-1 factors.
inline MarginalTable tally(const Dataset& dataset, std::vector<int> vars) {
    MarginalTable t;
    t.vars = std::move(vars);
    t.strides.assign(t.vars.size(), 1);
    std::uint64_t stride = 1;
    for (std::size_t k = t.vars.size(); k-- > 0;) {
        t.strides[k] = stride;
        stride = checked_product(
            stride, static_cast<std::uint64_t>(dataset.schema.levels_of(t.vars[k])),
            "marginal cell space");
    }
    t.cells.reserve(dataset.rows.size());
    for (const Row& row : dataset.rows) {
        t.cells.emplace_back(t.encode(row.values), row.count);
    }
    std::sort(t.cells.begin(), t.cells.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
        if (out > 0 && t.cells[out - 1].first == t.cells[i].first) {
            t.cells[out - 1].second += t.cells[i].second;
        } else {
            t.cells[out++] = t.cells[i];
        }
    }
    t.cells.resize(out);
    t.total = dataset.total;
    return t;
}

// A decomposable model fitted to a dataset: the graph, its decomposition and
// the observed clique/separator tables. The joint estimate is the closed-form
// product of clique marginals over separator marginals; nothing is smoothed,
// so unobserved cells keep probability exactly zero.
struct FittedModel {
    ModelGraph graph;
    Decomposition decomposition;
    std::vector<MarginalTable> clique_tables;
    std::vector<MarginalTable> separator_tables;
    Schema schema;
    long long sample_size = 0;
};

inline FittedModel fit(const Dataset& dataset, const ModelGraph& graph) {
    if (graph.n != dataset.schema.arity()) {
        throw model_error("graph has " + std::to_string(graph.n) + " vertices but schema has " +
                          std::to_string(dataset.schema.arity()) + " variables");
    }
    FittedModel m;
    m.graph = graph;
    m.decomposition = decompose(graph);
    m.schema = dataset.schema;
    m.sample_size = dataset.total;
    m.clique_tables.reserve(m.decomposition.cliques.size());
    for (const auto& c : m.decomposition.cliques) m.clique_tables.push_back(tally(dataset, c));
    m.separator_tables.reserve(m.decomposition.separators.size());
    for (const auto& s : m.decomposition.separators) m.separator_tables.push_back(tally(dataset, s));
    return m;
}

// Estimated probability of one full instance: product of clique relative
// frequencies divided by separator relative frequencies. Any zero clique
// count makes the product zero before separators are touched, which encodes
// the 0/0 -> 0 convention for cells outside the observed support.
inline double joint_probability(const FittedModel& m, std::span<const int> instance) {
    if (static_cast<int>(instance.size()) != m.graph.n) {
        throw model_error("instance arity does not match model");
    }
    const double n = static_cast<double>(m.sample_size);
    double numerator = 1.0;
    for (const MarginalTable& t : m.clique_tables) {
        long long c = t.count(t.encode(instance));
        if (c == 0) return 0.0;
        numerator *= static_cast<double>(c) / n;
    }
    double result = numerator;
    for (const MarginalTable& t : m.separator_tables) {
        long long c = t.count(t.encode(instance));
        if (c == 0) return 0.0;
        result /= static_cast<double>(c) / n;
    }
    return result;
}

// Degrees of freedom adjusted for sparseness: cells with positive count in
// clique tables minus those in separator tables, floored at zero. For the
// saturated model this is the number of distinct observed instance vectors.
inline long long adjusted_dof(const FittedModel& m) {
    long long dof = 0;
    for (const MarginalTable& t : m.clique_tables) dof += t.positive_cells();
    for (const MarginalTable& t : m.separator_tables) dof -= t.positive_cells();
    return dof < 0 ? 0 : dof;
}

// Star graph joining every feature to the class variable.
inline ModelGraph naive_bayes_graph(const Schema& schema) {
    ModelGraph g{schema.arity(), {}};
    const int cls = schema.class_index();
    for (int i = 0; i < cls; ++i) g.edges.push_back({i, cls});
    return g;
}

}  // namespace decomod
