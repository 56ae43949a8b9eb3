#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace decomod {

// Undirected edge in canonical form (a < b).
struct Edge {
    int a = 0;
    int b = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(int i, int j) {
    if (i == j) throw model_error("self-loop edge (" + std::to_string(i) + ")");
    if (i > j) std::swap(i, j);
    if (i < 0) throw model_error("negative vertex index");
    return {i, j};
}

// Undirected graph over variable indices 0..n-1 with a canonically sorted,
// duplicate-free edge list. Equality of graphs is equality of these lists.
struct ModelGraph {
    int n = 0;
    std::vector<Edge> edges;
    friend bool operator==(const ModelGraph&, const ModelGraph&) = default;
};

inline ModelGraph make_graph(int n, std::vector<Edge> edges) {
    if (n < 1) throw model_error("graph needs at least one vertex");
    for (auto& e : edges) {
        e = make_edge(e.a, e.b);
        if (e.b >= n) throw model_error("edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return {n, std::move(edges)};
}

inline bool has_edge(const ModelGraph& g, int i, int j) {
    if (i == j) return false;
    Edge e = make_edge(i, j);
    return std::binary_search(g.edges.begin(), g.edges.end(), e);
}

inline ModelGraph with_edge(const ModelGraph& g, Edge e) {
    std::vector<Edge> edges = g.edges;
    edges.push_back(e);
    return make_graph(g.n, std::move(edges));
}

inline ModelGraph without_edge(const ModelGraph& g, Edge e) {
    std::vector<Edge> edges;
    edges.reserve(g.edges.size());
    for (const Edge& x : g.edges) {
        if (!(x == e)) edges.push_back(x);
    }
    return {g.n, std::move(edges)};
}

// Model complexity as used throughout: the number of edges.
inline int complexity(const ModelGraph& g) { return static_cast<int>(g.edges.size()); }

enum class BoundaryKind { saturated, independence };

inline ModelGraph boundary_graph(int n, BoundaryKind kind) {
    if (n < 1) throw model_error("graph needs at least one vertex");
    ModelGraph g{n, {}};
    if (kind == BoundaryKind::saturated) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j});
        }
    }
    return g;
}

namespace detail {

inline std::vector<char> adjacency_matrix(const ModelGraph& g) {
    std::vector<char> adj(static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n), 0);
    for (const Edge& e : g.edges) {
        adj[static_cast<std::size_t>(e.a) * g.n + e.b] = 1;
        adj[static_cast<std::size_t>(e.b) * g.n + e.a] = 1;
    }
    return adj;
}

struct McsResult {
    bool chordal = true;
    std::vector<int> order;                        // visit order
    std::vector<std::vector<int>> earlier_nbrs;    // per visit position
};

// Maximum cardinality search. The graph is chordal iff, for every vertex, its
// already-visited neighbours form a clique (equivalently the reverse visit
// order is a perfect elimination ordering). Ties pick the lowest index, which
// makes decompositions deterministic.
inline McsResult mcs(const ModelGraph& g) {
    const int n = g.n;
    std::vector<char> adj = adjacency_matrix(g);
    std::vector<int> weight(static_cast<std::size_t>(n), 0);
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    McsResult res;
    res.order.reserve(static_cast<std::size_t>(n));
    res.earlier_nbrs.reserve(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
        int v = -1;
        for (int u = 0; u < n; ++u) {
            if (!visited[static_cast<std::size_t>(u)] &&
                (v < 0 || weight[static_cast<std::size_t>(u)] > weight[static_cast<std::size_t>(v)])) {
                v = u;
            }
        }
        visited[static_cast<std::size_t>(v)] = 1;
        std::vector<int> earlier;
        for (int u : res.order) {
            if (adj[static_cast<std::size_t>(v) * n + u]) earlier.push_back(u);
        }
        std::sort(earlier.begin(), earlier.end());
        for (std::size_t i = 0; i < earlier.size() && res.chordal; ++i) {
            for (std::size_t j = i + 1; j < earlier.size(); ++j) {
                if (!adj[static_cast<std::size_t>(earlier[i]) * n + earlier[j]]) {
                    res.chordal = false;
                    break;
                }
            }
        }
        for (int u = 0; u < n; ++u) {
            if (!visited[static_cast<std::size_t>(u)] && adj[static_cast<std::size_t>(v) * n + u]) {
                ++weight[static_cast<std::size_t>(u)];
            }
        }
        res.order.push_back(v);
        res.earlier_nbrs.push_back(std::move(earlier));
    }
    return res;
}

}  // namespace detail

inline bool is_decomposable(const ModelGraph& g) { return detail::mcs(g).chordal; }

// Maximal cliques in an order with the running intersection property, plus
// the separators for cliques 2..k (possibly empty, kept with multiplicity).
struct Decomposition {
    std::vector<std::vector<int>> cliques;
    std::vector<std::vector<int>> separators;
};

// Fails on non-chordal input; never triangulates silently.
inline Decomposition decompose(const ModelGraph& g) {
    detail::McsResult m = detail::mcs(g);
    if (!m.chordal) throw model_error("graph is not decomposable");

    std::vector<std::vector<int>> candidates;  // in MCS discovery order
    for (std::size_t i = 0; i < m.order.size(); ++i) {
        std::vector<int> c = m.earlier_nbrs[i];
        c.push_back(m.order[i]);
        std::sort(c.begin(), c.end());
        candidates.push_back(std::move(c));
    }
    Decomposition d;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool maximal = true;
        for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
            if (i == j) continue;
            if (candidates[i].size() < candidates[j].size() ||
                (candidates[i].size() == candidates[j].size() && j < i)) {
                maximal = !std::includes(candidates[j].begin(), candidates[j].end(),
                                         candidates[i].begin(), candidates[i].end());
            }
        }
        if (maximal) d.cliques.push_back(candidates[i]);
    }

    std::vector<int> seen;
    for (std::size_t j = 0; j < d.cliques.size(); ++j) {
        if (j > 0) {
            std::vector<int> sep;
            std::set_intersection(d.cliques[j].begin(), d.cliques[j].end(), seen.begin(),
                                  seen.end(), std::back_inserter(sep));
            // Running intersection: the separator must lie inside one earlier clique.
            bool covered = sep.empty();
            for (std::size_t i = 0; i < j && !covered; ++i) {
                covered = std::includes(d.cliques[i].begin(), d.cliques[i].end(), sep.begin(),
                                        sep.end());
            }
            if (!covered) throw model_error("internal: clique ordering violates running intersection");
            d.separators.push_back(std::move(sep));
        }
        std::vector<int> merged;
        std::set_union(seen.begin(), seen.end(), d.cliques[j].begin(), d.cliques[j].end(),
                       std::back_inserter(merged));
        seen = std::move(merged);
    }
    return d;
}

enum class NeighborDirection { add, remove };

// All decomposable one-edge modifications of a decomposable graph, in
// canonical edge order. Candidates whose result is non-decomposable are
// dropped, not triangulated.
inline std::vector<std::pair<Edge, ModelGraph>> enumerate_neighbors(const ModelGraph& g,
                                                                    NeighborDirection dir) {
    std::vector<std::pair<Edge, ModelGraph>> out;
    if (dir == NeighborDirection::remove) {
        for (const Edge& e : g.edges) {
            ModelGraph h = without_edge(g, e);
            if (is_decomposable(h)) out.emplace_back(e, std::move(h));
        }
    } else {
        for (int i = 0; i < g.n; ++i) {
            for (int j = i + 1; j < g.n; ++j) {
                if (has_edge(g, i, j)) continue;
                ModelGraph h = with_edge(g, {i, j});
                if (is_decomposable(h)) out.emplace_back(Edge{i, j}, std::move(h));
            }
        }
    }
    return out;
}

// Model notation: parenthesized cliques over variable names, e.g.
// "(C2 E S)(C1 C3 S)". Formatting lists cliques in decomposition order with
// members sorted by name; isolated vertices appear as singleton cliques, so
// every printed string parses back to the identical graph.
inline std::string format_model(const ModelGraph& g, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != g.n) {
        throw model_error("name list does not match graph size");
    }
    Decomposition d = decompose(g);
    std::string out;
    for (const auto& clique : d.cliques) {
        std::vector<std::string> members;
        members.reserve(clique.size());
        for (int v : clique) members.push_back(names[static_cast<std::size_t>(v)]);
        std::sort(members.begin(), members.end());
        out.push_back('(');
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) out.push_back(' ');
            out += members[i];
        }
        out.push_back(')');
    }
    return out;
}

inline ModelGraph parse_model(std::string_view text, const std::vector<std::string>& names) {
    std::map<std::string, int, std::less<>> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
        index.emplace(names[i], static_cast<int>(i));
    }
    std::vector<Edge> edges;
    std::size_t pos = 0;
    bool any_clique = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++pos;
            continue;
        }
        if (c != '(') throw parse_error("expected '(' in model notation");
        std::size_t close = text.find(')', pos);
        if (close == std::string_view::npos) throw parse_error("unbalanced '(' in model notation");
        std::string_view body = text.substr(pos + 1, close - pos - 1);
        std::vector<int> members;
        std::size_t t = 0;
        while (t < body.size()) {
            while (t < body.size() && (body[t] == ' ' || body[t] == '\t')) ++t;
            std::size_t e = t;
            while (e < body.size() && body[e] != ' ' && body[e] != '\t') ++e;
            if (e > t) {
                auto it = index.find(body.substr(t, e - t));
                if (it == index.end()) {
                    throw parse_error("unknown variable '" + std::string(body.substr(t, e - t)) +
                                      "' in model notation");
                }
                members.push_back(it->second);
            }
            t = e;
        }
        if (members.empty()) throw parse_error("empty clique in model notation");
        std::sort(members.begin(), members.end());
        if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
            throw parse_error("repeated variable inside a clique");
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                edges.push_back({members[i], members[j]});
            }
        }
        any_clique = true;
        pos = close + 1;
    }
    if (!any_clique) throw parse_error("model notation contains no cliques");
    return make_graph(static_cast<int>(names.size()), std::move(edges));
}

}  // namespace decomod
