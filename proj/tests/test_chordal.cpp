#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <decomod/chordal.hpp>

#include "support/oracles.hpp"

using namespace decomod;

TEST_CASE("make_edge canonicalizes and rejects self-loops") {
    CHECK(make_edge(3, 1) == Edge{1, 3});
    CHECK_THROWS_AS(make_edge(2, 2), model_error);
    CHECK_THROWS_AS(make_edge(-1, 2), model_error);
}

TEST_CASE("make_graph sorts, dedups, and validates vertex range") {
    const ModelGraph g = make_graph(3, {{2, 1}, {0, 1}, {1, 2}});
    CHECK(g.edges == std::vector<Edge>{{0, 1}, {1, 2}});
    CHECK_THROWS_AS(make_graph(2, {{0, 2}}), model_error);
}

TEST_CASE("boundary graphs") {
    const ModelGraph sat = boundary_graph(9, BoundaryKind::saturated);
    CHECK(complexity(sat) == 36);  // n(n-1)/2 for n=9
    const ModelGraph ind = boundary_graph(4, BoundaryKind::independence);
    CHECK(complexity(ind) == 0);
}

TEST_CASE("is_decomposable matches the subset-scan oracle up to n=4") {
    for (int n = 1; n <= 4; ++n) {
        for (std::uint64_t mask = 0; mask < oracles::graph_count(n); ++mask) {
            const ModelGraph g = oracles::graph_from_mask(n, mask);
            INFO("n=" << n << " mask=" << mask);
            CHECK(is_decomposable(g) == oracles::chordal_by_subset_scan(g));
        }
    }
}

TEST_CASE("the 4-cycle and 5-cycle are rejected, chords repair them") {
    const ModelGraph c4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    CHECK_FALSE(is_decomposable(c4));
    CHECK_THROWS_AS(decompose(c4), model_error);
    CHECK(is_decomposable(with_edge(c4, {0, 2})));

    const ModelGraph c5 = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
    CHECK_FALSE(is_decomposable(c5));
    // one chord leaves a 4-cycle, so still not decomposable
    CHECK_FALSE(is_decomposable(with_edge(c5, {0, 2})));
    CHECK(is_decomposable(with_edge(with_edge(c5, {0, 2}), {0, 3})));
}

TEST_CASE("decompose on canonical shapes") {
    SECTION("empty graph: singleton cliques, empty separators") {
        const Decomposition d = decompose(make_graph(3, {}));
        REQUIRE(d.cliques.size() == 3);
        CHECK(d.cliques[0] == std::vector<int>{0});
        CHECK(d.cliques[2] == std::vector<int>{2});
        REQUIRE(d.separators.size() == 2);
        CHECK(d.separators[0].empty());
        CHECK(d.separators[1].empty());
    }
    SECTION("saturated: one clique, no separators") {
        const Decomposition d = decompose(boundary_graph(4, BoundaryKind::saturated));
        REQUIRE(d.cliques.size() == 1);
        CHECK(d.cliques[0] == std::vector<int>{0, 1, 2, 3});
        CHECK(d.separators.empty());
    }
    SECTION("path 0-1-2: two cliques sharing {1}") {
        const Decomposition d = decompose(make_graph(3, {{0, 1}, {1, 2}}));
        REQUIRE(d.cliques.size() == 2);
        REQUIRE(d.separators.size() == 1);
        CHECK(d.separators[0] == std::vector<int>{1});
    }
    SECTION("two disconnected edges: empty separator kept with multiplicity") {
        const Decomposition d = decompose(make_graph(4, {{0, 1}, {2, 3}}));
        REQUIRE(d.cliques.size() == 2);
        REQUIRE(d.separators.size() == 1);
        CHECK(d.separators[0].empty());
    }
}

namespace {

// Brute-force maximal complete subgraphs for small n.
std::set<std::vector<int>> maximal_cliques_brute(const ModelGraph& g) {
    const int n = g.n;
    std::vector<std::vector<int>> complete;
    for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
        std::vector<int> members;
        for (int v = 0; v < n; ++v) {
            if (subset >> v & 1) members.push_back(v);
        }
        bool ok = true;
        for (std::size_t i = 0; i < members.size() && ok; ++i) {
            for (std::size_t j = i + 1; j < members.size() && ok; ++j) {
                ok = has_edge(g, members[i], members[j]);
            }
        }
        if (ok) complete.push_back(std::move(members));
    }
    std::set<std::vector<int>> maximal;
    for (const auto& c : complete) {
        bool is_max = true;
        for (const auto& d : complete) {
            if (d.size() > c.size() &&
                std::includes(d.begin(), d.end(), c.begin(), c.end())) {
                is_max = false;
                break;
            }
        }
        if (is_max) maximal.insert(c);
    }
    return maximal;
}

}  // namespace

TEST_CASE("decompose returns exactly the maximal cliques, in an order with RIP") {
    for (int n = 2; n <= 5; ++n) {
        for (std::uint64_t mask = 0; mask < oracles::graph_count(n); ++mask) {
            const ModelGraph g = oracles::graph_from_mask(n, mask);
            if (!is_decomposable(g)) continue;
            const Decomposition d = decompose(g);

            std::set<std::vector<int>> got(d.cliques.begin(), d.cliques.end());
            REQUIRE(got == maximal_cliques_brute(g));
            REQUIRE(got.size() == d.cliques.size());  // no duplicates
            REQUIRE(d.separators.size() + 1 == d.cliques.size());

            // running intersection, checked independently
            std::set<int> seen(d.cliques[0].begin(), d.cliques[0].end());
            for (std::size_t j = 1; j < d.cliques.size(); ++j) {
                std::vector<int> inter;
                for (int v : d.cliques[j]) {
                    if (seen.count(v)) inter.push_back(v);
                }
                CHECK(inter == d.separators[j - 1]);
                bool inside_one = inter.empty();
                for (std::size_t i = 0; i < j && !inside_one; ++i) {
                    inside_one = std::includes(d.cliques[i].begin(), d.cliques[i].end(),
                                               inter.begin(), inter.end());
                }
                CHECK(inside_one);
                for (int v : d.cliques[j]) seen.insert(v);
            }
        }
    }
}

TEST_CASE("enumerate_neighbors equals filter-by-decomposability, n <= 4") {
    for (int n = 2; n <= 4; ++n) {
        for (std::uint64_t mask = 0; mask < oracles::graph_count(n); ++mask) {
            const ModelGraph g = oracles::graph_from_mask(n, mask);
            if (!is_decomposable(g)) continue;

            std::vector<Edge> added;
            for (const auto& [e, h] : enumerate_neighbors(g, NeighborDirection::add)) {
                CHECK(is_decomposable(h));
                CHECK(h == with_edge(g, e));
                added.push_back(e);
            }
            std::vector<Edge> expected_add;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (!has_edge(g, i, j) && is_decomposable(with_edge(g, {i, j}))) {
                        expected_add.push_back({i, j});
                    }
                }
            }
            CHECK(added == expected_add);

            std::vector<Edge> removed;
            for (const auto& [e, h] : enumerate_neighbors(g, NeighborDirection::remove)) {
                CHECK(is_decomposable(h));
                CHECK(h == without_edge(g, e));
                removed.push_back(e);
            }
            std::vector<Edge> expected_remove;
            for (const Edge& e : g.edges) {
                if (is_decomposable(without_edge(g, e))) expected_remove.push_back(e);
            }
            CHECK(removed == expected_remove);
        }
    }
}

TEST_CASE("model notation round-trips") {
    const std::vector<std::string> names{"E", "L1", "L2", "R1", "R2", "C1", "C2", "C3", "S"};

    SECTION("a named two-clique model") {
        const ModelGraph g = parse_model("(C2 E S)(C1 C3 S)", names);
        CHECK(complexity(g) == 6);
        CHECK(has_edge(g, 0, 6));   // E - C2
        CHECK(has_edge(g, 0, 8));   // E - S
        CHECK(has_edge(g, 5, 7));   // C1 - C3
        CHECK(has_edge(g, 5, 8));   // C1 - S
        CHECK_FALSE(has_edge(g, 1, 8));  // L1 - S absent
        const ModelGraph again = parse_model(format_model(g, names), names);
        CHECK(again == g);
    }

    SECTION("unmentioned variables become isolated singletons") {
        const ModelGraph g = parse_model("(E S)", names);
        CHECK(g.n == 9);
        CHECK(complexity(g) == 1);
        // formatting shows the isolated vertices so the string parses back
        CHECK(parse_model(format_model(g, names), names) == g);
    }

    SECTION("random graphs round-trip") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const ModelGraph g = oracles::random_decomposable_graph(6, 7, seed);
            std::vector<std::string> vnames{"A", "B", "C", "D", "E", "S"};
            CHECK(parse_model(format_model(g, vnames), vnames) == g);
        }
    }

    SECTION("parse errors") {
        CHECK_THROWS_AS(parse_model("(E S", names), parse_error);        // unbalanced
        CHECK_THROWS_AS(parse_model("(E X)", names), parse_error);       // unknown variable
        CHECK_THROWS_AS(parse_model("(E E S)", names), parse_error);     // repeated member
        CHECK_THROWS_AS(parse_model("()", names), parse_error);          // empty clique
        CHECK_THROWS_AS(parse_model("(E S) junk", names), parse_error);  // stray text
    }
}
