#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "chordal.hpp"
#include "common.hpp"
#include "estimate.hpp"
#include "rng.hpp"
#include "schema.hpp"

namespace decomod {

// Nonnegative fit/complexity differences between a nested model pair.
struct DeltaStats {
    double delta_g2 = 0.0;
    long long delta_dof = 0;
};

enum class CriterionKind { aic, bic, chi2, exact };

struct CriterionConfig {
    CriterionKind kind = CriterionKind::aic;
    double alpha = 1e-4;
    int mc_replicates = 999;
    std::uint64_t seed = 0;
};

inline void validate_criterion_config(const CriterionConfig& config) {
    if (config.kind == CriterionKind::chi2 || config.kind == CriterionKind::exact) {
        if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
            throw config_error("alpha must lie strictly between 0 and 1");
        }
    }
    if (config.kind == CriterionKind::exact && config.mc_replicates < 1) {
        throw config_error("mc_replicates must be at least 1");
    }
}

namespace detail {

inline void check_model_matches(const Dataset& dataset, const FittedModel& m) {
    if (m.graph.n != dataset.schema.arity()) {
        throw model_error("model and dataset have different arity");
    }
    for (int i = 0; i < dataset.schema.arity(); ++i) {
        if (m.schema.variable(i).name != dataset.schema.variable(i).name ||
            m.schema.variable(i).levels.size() != dataset.schema.variable(i).levels.size()) {
            throw model_error("model schema does not match dataset schema");
        }
    }
}

}  // namespace detail

// Likelihood-ratio statistic against the saturated model:
//   2 * sum over observed cells of f * ln(f / e),  e = N * estimated probability.
// Cells with zero observed count contribute nothing. A zero estimate on an
// observed cell cannot happen for a model fitted to the same data and is
// reported as a model error rather than silently producing infinity.
inline double g_squared(const Dataset& dataset, const FittedModel& model) {
    detail::check_model_matches(dataset, model);
    const double n = static_cast<double>(dataset.total);
    double sum = 0.0;
    for (const Row& row : dataset.rows) {
        const double e = n * joint_probability(model, row.values);
        if (!(e > 0.0)) {
            throw model_error("observed instance has zero estimated probability; "
                              "the model was not fitted to this dataset");
        }
        const double f = static_cast<double>(row.count);
        sum += f * std::log(f / e);
    }
    return 2.0 * sum;
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (long k = 1; k < 1000000; ++k) {
        term *= x / (a + static_cast<double>(k));
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), evaluated with Lentz's method.
inline double gamma_q_continued_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i < 1000000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized lower incomplete gamma P(a,x).
inline double regularized_gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    double p = (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_continued_fraction(a, x);
    return std::min(1.0, std::max(0.0, p));
}

// Upper tail Q(a,x), computed directly so small p-values keep precision.
inline double regularized_gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    double q = (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_continued_fraction(a, x);
    return std::min(1.0, std::max(0.0, q));
}

}  // namespace detail

// Chi-square CDF with `dof` degrees of freedom.
inline double chi_square_cdf(double x, long long dof) {
    if (dof < 1) throw config_error("degrees of freedom must be at least 1");
    if (!(x >= 0.0)) throw config_error("chi-square statistic must be nonnegative");
    return detail::regularized_gamma_p(static_cast<double>(dof) / 2.0, x / 2.0);
}

// Upper-tail significance of the nested difference.
inline double chi2_significance(const DeltaStats& delta) {
    const long long dof = delta.delta_dof < 1 ? 1 : delta.delta_dof;
    if (!(delta.delta_g2 >= 0.0)) throw config_error("delta_g2 must be nonnegative");
    return detail::regularized_gamma_q(static_cast<double>(dof) / 2.0, delta.delta_g2 / 2.0);
}

// Penalized fit difference: positive when the extra edge pays for itself.
inline double information_criterion(const DeltaStats& delta, double kappa) {
    if (!(kappa > 0.0)) throw config_error("kappa must be positive");
    return delta.delta_g2 - kappa * static_cast<double>(delta.delta_dof);
}

namespace detail {

inline void check_nested_pair(const ModelGraph& simpler, const ModelGraph& complex_graph,
                              Edge* differing) {
    if (simpler.n != complex_graph.n) throw model_error("nested pair must share the vertex set");
    std::vector<Edge> extra;
    if (!std::includes(complex_graph.edges.begin(), complex_graph.edges.end(),
                       simpler.edges.begin(), simpler.edges.end())) {
        throw model_error("models are not nested");
    }
    std::set_difference(complex_graph.edges.begin(), complex_graph.edges.end(),
                        simpler.edges.begin(), simpler.edges.end(), std::back_inserter(extra));
    if (extra.size() > 1) throw model_error("nested pair must differ by at most one edge");
    if (differing) *differing = extra.empty() ? Edge{-1, -1} : extra[0];
}

}  // namespace detail

// Differences between two models fitted to the same data, the complex one
// extending the simpler one by at most one edge. Both components are clamped
// at zero: the fit difference is nonnegative by theory and only loses to
// rounding, while the adjusted dof difference genuinely can come out negative
// under sparseness.
inline DeltaStats delta_statistics(const Dataset& dataset, const FittedModel& simpler,
                                   const FittedModel& complex_model) {
    detail::check_nested_pair(simpler.graph, complex_model.graph, nullptr);
    DeltaStats d;
    d.delta_g2 = g_squared(dataset, simpler) - g_squared(dataset, complex_model);
    if (!(d.delta_g2 > 0.0)) d.delta_g2 = 0.0;
    d.delta_dof = adjusted_dof(complex_model) - adjusted_dof(simpler);
    if (d.delta_dof < 0) d.delta_dof = 0;
    return d;
}

namespace detail {

// Local view of a one-edge nested pair. With complex = simpler + (a,b) and C
// the unique complex clique containing both endpoints, writing S = C\{a,b}:
// the G2 and adjusted-dof differences of the refitted pair depend on the data
// only through the marginal table on C, and under the simpler fit the
// marginal law of C factorizes as p(S) * p(a|S) * p(b|S) with all three
// factors read off observed counts. That makes one-edge scoring and the
// conditional bootstrap linear in the number of observed C-cells.
struct LocalTables {
    std::vector<int> sep_vars;
    int var_a = 0, var_b = 0;
    std::uint64_t levels_a = 1, levels_b = 1;

    struct SepCell {
        std::uint64_t code = 0;
        long long count = 0;
        std::uint32_t a_begin = 0, a_end = 0;  // range into a_entries
        std::uint32_t b_begin = 0, b_end = 0;  // range into b_entries
    };
    std::vector<SepCell> sep_cells;                     // sorted by code
    std::vector<long long> sep_cum;                     // cumulative counts
    std::vector<std::pair<int, long long>> a_entries;   // (value, cumulative in cell)
    std::vector<std::pair<int, long long>> b_entries;
    long long total = 0;
    DeltaStats observed;
};

inline double xlogx(long long n) {
    return n > 0 ? static_cast<double>(n) * std::log(static_cast<double>(n)) : 0.0;
}

inline LocalTables build_local_tables(const Dataset& dataset, const ModelGraph& complex_graph,
                                      Edge edge) {
    Decomposition dec = decompose(complex_graph);
    const int a = edge.a, b = edge.b;
    int host = -1;
    for (std::size_t j = 0; j < dec.cliques.size(); ++j) {
        const auto& c = dec.cliques[j];
        if (std::binary_search(c.begin(), c.end(), a) && std::binary_search(c.begin(), c.end(), b)) {
            if (host >= 0) {
                throw model_error("edge lies in more than one clique; removing it would not "
                                  "leave a decomposable graph");
            }
            host = static_cast<int>(j);
        }
    }
    if (host < 0) throw model_error("edge endpoints are not adjacent in the complex model");

    LocalTables lt;
    lt.var_a = a;
    lt.var_b = b;
    lt.levels_a = static_cast<std::uint64_t>(dataset.schema.levels_of(a));
    lt.levels_b = static_cast<std::uint64_t>(dataset.schema.levels_of(b));
    for (int v : dec.cliques[static_cast<std::size_t>(host)]) {
        if (v != a && v != b) lt.sep_vars.push_back(v);
    }
    std::vector<std::uint64_t> strides(lt.sep_vars.size(), 1);
    std::uint64_t stride = 1;
    for (std::size_t k = lt.sep_vars.size(); k-- > 0;) {
        strides[k] = stride;
        stride = checked_product(stride,
                                 static_cast<std::uint64_t>(dataset.schema.levels_of(lt.sep_vars[k])),
                                 "separator cell space");
    }

    // Aggregate (separator cell, a value, b value) triples over the dataset.
    struct Triple {
        std::uint64_t sep;
        int a, b;
        long long count;
    };
    std::vector<Triple> triples;
    triples.reserve(dataset.rows.size());
    for (const Row& row : dataset.rows) {
        std::uint64_t code = 0;
        for (std::size_t k = 0; k < lt.sep_vars.size(); ++k) {
            code += strides[k] *
                    static_cast<std::uint64_t>(row.values[static_cast<std::size_t>(lt.sep_vars[k])]);
        }
        triples.push_back({code, row.values[static_cast<std::size_t>(a)],
                           row.values[static_cast<std::size_t>(b)], row.count});
    }
    std::sort(triples.begin(), triples.end(), [](const Triple& x, const Triple& y) {
        if (x.sep != y.sep) return x.sep < y.sep;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    double sum_c = 0.0, sum_ca = 0.0, sum_cb = 0.0, sum_s = 0.0;
    long long pos_c = 0, pos_ca = 0, pos_cb = 0, pos_s = 0;

    std::size_t i = 0;
    while (i < triples.size()) {
        std::size_t cell_end = i;
        long long cell_count = 0;
        while (cell_end < triples.size() && triples[cell_end].sep == triples[i].sep) {
            cell_count += triples[cell_end].count;
            ++cell_end;
        }
        LocalTables::SepCell cell;
        cell.code = triples[i].sep;
        cell.count = cell_count;
        ++pos_s;
        sum_s += xlogx(cell_count);

        // a-margin within this separator cell (triples are sorted by a here)
        cell.a_begin = static_cast<std::uint32_t>(lt.a_entries.size());
        {
            long long cum = 0;
            std::size_t j = i;
            while (j < cell_end) {
                long long c = 0;
                int value = triples[j].a;
                std::size_t k = j;
                // aggregate full (a,b) cells on the way through
                while (k < cell_end && triples[k].a == value) {
                    long long cc = 0;
                    int bval = triples[k].b;
                    while (k < cell_end && triples[k].a == value && triples[k].b == bval) {
                        cc += triples[k].count;
                        ++k;
                    }
                    sum_c += xlogx(cc);
                    ++pos_c;
                    c += cc;
                }
                cum += c;
                lt.a_entries.emplace_back(value, cum);
                sum_ca += xlogx(c);
                ++pos_ca;
                j = k;
            }
        }
        cell.a_end = static_cast<std::uint32_t>(lt.a_entries.size());

        // b-margin needs its own ordering within the cell
        cell.b_begin = static_cast<std::uint32_t>(lt.b_entries.size());
        {
            std::vector<std::pair<int, long long>> bcounts;
            for (std::size_t j = i; j < cell_end; ++j) {
                bcounts.emplace_back(triples[j].b, triples[j].count);
            }
            std::sort(bcounts.begin(), bcounts.end());
            long long cum = 0;
            std::size_t j = 0;
            while (j < bcounts.size()) {
                long long c = 0;
                int value = bcounts[j].first;
                while (j < bcounts.size() && bcounts[j].first == value) {
                    c += bcounts[j].second;
                    ++j;
                }
                cum += c;
                lt.b_entries.emplace_back(value, cum);
                sum_cb += xlogx(c);
                ++pos_cb;
            }
        }
        cell.b_end = static_cast<std::uint32_t>(lt.b_entries.size());

        lt.sep_cells.push_back(cell);
        i = cell_end;
    }

    lt.total = dataset.total;
    lt.sep_cum.reserve(lt.sep_cells.size());
    long long running = 0;
    for (const auto& cell : lt.sep_cells) {
        running += cell.count;
        lt.sep_cum.push_back(running);
    }

    lt.observed.delta_g2 = 2.0 * (sum_c + sum_s - sum_ca - sum_cb);
    if (!(lt.observed.delta_g2 > 0.0)) lt.observed.delta_g2 = 0.0;
    lt.observed.delta_dof = pos_c + pos_s - pos_ca - pos_cb;
    if (lt.observed.delta_dof < 0) lt.observed.delta_dof = 0;
    return lt;
}

struct ReplicateScratch {
    std::vector<std::uint64_t> codes_ab;
    std::vector<std::uint64_t> codes_b;
};

// One parametric-bootstrap replicate: N draws from the simpler fit's local
// law, returning the refitted pair's G2 difference (computed from the drawn
// C-marginal, which carries the entire difference).
inline double replicate_delta_g2(const LocalTables& lt, Rng& rng, ReplicateScratch& scratch) {
    scratch.codes_ab.clear();
    scratch.codes_b.clear();
    const std::uint64_t la = lt.levels_a, lb = lt.levels_b;
    for (long long draw = 0; draw < lt.total; ++draw) {
        const long long r = static_cast<long long>(rng.below(static_cast<std::uint64_t>(lt.total)));
        const std::size_t cell_idx = static_cast<std::size_t>(
            std::upper_bound(lt.sep_cum.begin(), lt.sep_cum.end(), r) - lt.sep_cum.begin());
        const LocalTables::SepCell& cell = lt.sep_cells[cell_idx];

        const long long ua = static_cast<long long>(rng.below(static_cast<std::uint64_t>(cell.count)));
        const auto a_first = lt.a_entries.begin() + cell.a_begin;
        const auto a_last = lt.a_entries.begin() + cell.a_end;
        const int av = std::upper_bound(a_first, a_last, ua,
                                        [](long long u, const auto& e) { return u < e.second; })
                           ->first;

        const long long ub = static_cast<long long>(rng.below(static_cast<std::uint64_t>(cell.count)));
        const auto b_first = lt.b_entries.begin() + cell.b_begin;
        const auto b_last = lt.b_entries.begin() + cell.b_end;
        const int bv = std::upper_bound(b_first, b_last, ub,
                                        [](long long u, const auto& e) { return u < e.second; })
                           ->first;

        const std::uint64_t idx = static_cast<std::uint64_t>(cell_idx);
        scratch.codes_ab.push_back((idx * la + static_cast<std::uint64_t>(av)) * lb +
                                   static_cast<std::uint64_t>(bv));
        scratch.codes_b.push_back(idx * lb + static_cast<std::uint64_t>(bv));
    }
    std::sort(scratch.codes_ab.begin(), scratch.codes_ab.end());
    std::sort(scratch.codes_b.begin(), scratch.codes_b.end());

    double sum_c = 0.0, sum_ca = 0.0, sum_cb = 0.0, sum_s = 0.0;
    {
        const std::vector<std::uint64_t>& v = scratch.codes_ab;
        std::size_t i = 0;
        long long run_ab = 0, run_a = 0, run_s = 0;
        for (i = 0; i < v.size(); ++i) {
            ++run_ab;
            ++run_a;
            ++run_s;
            const bool last = (i + 1 == v.size());
            const std::uint64_t cur = v[i];
            const std::uint64_t nxt = last ? 0 : v[i + 1];
            if (last || cur != nxt) {
                sum_c += xlogx(run_ab);
                run_ab = 0;
            }
            if (last || cur / lb != nxt / lb) {
                sum_ca += xlogx(run_a);
                run_a = 0;
            }
            if (last || cur / (la * lb) != nxt / (la * lb)) {
                sum_s += xlogx(run_s);
                run_s = 0;
            }
        }
    }
    {
        const std::vector<std::uint64_t>& v = scratch.codes_b;
        long long run = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            ++run;
            if (i + 1 == v.size() || v[i] != v[i + 1]) {
                sum_cb += xlogx(run);
                run = 0;
            }
        }
    }
    double g2 = 2.0 * (sum_c + sum_s - sum_ca - sum_cb);
    return g2 > 0.0 ? g2 : 0.0;
}

inline double mc_significance(const LocalTables& lt, int replicates, std::uint64_t seed) {
    long long hits = 0;
    ReplicateScratch scratch;
    scratch.codes_ab.reserve(static_cast<std::size_t>(lt.total));
    scratch.codes_b.reserve(static_cast<std::size_t>(lt.total));
    for (int rep = 0; rep < replicates; ++rep) {
        Rng rng(derive_seed(seed, 0x657861637472ull, static_cast<std::uint64_t>(rep)));
        if (replicate_delta_g2(lt, rng, scratch) >= lt.observed.delta_g2) ++hits;
    }
    return static_cast<double>(1 + hits) / static_cast<double>(replicates + 1);
}

}  // namespace detail

// Delta statistics for a one-edge nested pair computed from the local tables
// of the clique hosting the edge. Equal to delta_statistics() on the two
// fitted models, at a fraction of the cost.
inline DeltaStats local_delta_statistics(const Dataset& dataset, const ModelGraph& complex_graph,
                                         Edge edge) {
    return detail::build_local_tables(dataset, complex_graph, edge).observed;
}

// Monte Carlo exact conditional test for a one-edge nested pair. The simpler
// model is fitted to the data, `mc_replicates` synthetic size-N datasets are
// drawn from that fit, the pair is refitted to each draw, and the returned
// significance is (1 + #{replicate delta_g2 >= observed}) / (replicates + 1),
// which can never reach zero. Replicate r consumes a stream derived from
// (seed, r) only, so any evaluation order produces identical results.
inline double exact_conditional_significance(const Dataset& dataset, const ModelGraph& simpler,
                                             const ModelGraph& complex_graph,
                                             const CriterionConfig& config) {
    if (config.mc_replicates < 1) throw config_error("mc_replicates must be at least 1");
    Edge differing{-1, -1};
    detail::check_nested_pair(simpler, complex_graph, &differing);
    if (differing.a < 0) return 1.0;  // identical graphs: every replicate ties
    if (complex_graph.n != dataset.schema.arity()) {
        throw model_error("graph does not match dataset arity");
    }
    detail::LocalTables lt = detail::build_local_tables(dataset, complex_graph, differing);
    return detail::mc_significance(lt, config.mc_replicates, config.seed);
}

}  // namespace decomod
