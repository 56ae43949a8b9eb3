// Acceptance runner: one independently checkable criterion per line, each
// with a hard time budget. Exits nonzero if any line fails. The checks favor
// independent oracles (subset-scan chordality, dense IPF, closed-form CDFs,
// direct product-form classification) over re-deriving answers with the
// library's own algorithms.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <decomod/decomod.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace decomod;

namespace {

int g_failures = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

void criterion(int idx, const char* name, double budget_s, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > budget_s) {
        out.pass = false;
        if (!out.detail.empty()) out.detail += "; ";
        out.detail += "over time budget";
    }
    std::printf("%s %2d %-28s %6.2fs/%gs%s%s\n", out.pass ? "PASS" : "FAIL", idx, name, elapsed,
                budget_s, out.detail.empty() ? "" : "  ", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++g_failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Dense fitted joint, indexed like oracles::encode_cell.
std::vector<double> dense_joint(const FittedModel& model) {
    const std::uint64_t cells = oracles::cell_count(model.schema);
    std::vector<double> joint(static_cast<std::size_t>(cells), 0.0);
    for (std::uint64_t c = 0; c < cells; ++c) {
        const std::vector<int> inst = oracles::decode_cell(model.schema, c);
        joint[static_cast<std::size_t>(c)] =
            joint_probability(model, std::span<const int>(inst.data(), inst.size()));
    }
    return joint;
}

// Upper-tail probability of the chi-square distribution with even dof = 2m,
// via the closed-form series Q = exp(-x/2) * sum_{j<m} (x/2)^j / j!, summed
// in log space for stability.
double chi2_upper_tail_even(double x, int dof) {
    const double h = x / 2.0;
    double q = 0.0;
    for (int j = 0; j < dof / 2; ++j) {
        q += std::exp(-h + j * std::log(h) - std::lgamma(j + 1.0));
    }
    return q;
}

Outcome check_chordality_oracle() {
    const int n = 5;
    for (std::uint64_t mask = 0; mask < oracles::graph_count(n); ++mask) {
        const ModelGraph g = oracles::graph_from_mask(n, mask);
        if (is_decomposable(g) != oracles::chordal_by_subset_scan(g)) {
            return {false, "disagreement at n=5 mask " + std::to_string(mask)};
        }
    }
    return {true, "1024 graphs"};
}

Outcome check_neighbor_enumeration() {
    long long checked = 0;
    for (int n = 2; n <= 5; ++n) {
        for (std::uint64_t mask = 0; mask < oracles::graph_count(n); ++mask) {
            const ModelGraph g = oracles::graph_from_mask(n, mask);
            if (!is_decomposable(g)) continue;
            ++checked;

            // Additions: every non-edge whose insertion stays decomposable.
            std::vector<std::pair<Edge, ModelGraph>> want_add;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (has_edge(g, i, j)) continue;
                    ModelGraph h = with_edge(g, make_edge(i, j));
                    if (is_decomposable(h)) want_add.push_back({make_edge(i, j), std::move(h)});
                }
            }
            const auto got_add = enumerate_neighbors(g, NeighborDirection::add);
            if (got_add != want_add) {
                return {false, "add mismatch at n=" + std::to_string(n) + " mask " +
                                   std::to_string(mask)};
            }

            // Removals: every edge whose deletion stays decomposable.
            std::vector<std::pair<Edge, ModelGraph>> want_remove;
            for (const Edge& e : g.edges) {
                ModelGraph h = without_edge(g, e);
                if (is_decomposable(h)) want_remove.push_back({e, std::move(h)});
            }
            const auto got_remove = enumerate_neighbors(g, NeighborDirection::remove);
            if (got_remove != want_remove) {
                return {false, "remove mismatch at n=" + std::to_string(n) + " mask " +
                                   std::to_string(mask)};
            }
        }
    }
    return {true, std::to_string(checked) + " decomposable graphs"};
}

// Shared suite for the closed-form-fit criteria: 50 random decomposable
// models over 2..4 variables with 2..3 levels, each on a complete table.
struct FitCase {
    Schema schema;
    ModelGraph graph;
    Dataset data;
};

std::vector<FitCase> fit_suite() {
    std::vector<FitCase> cases;
    Rng rng(20260817);
    for (int k = 0; k < 50; ++k) {
        const int n = 2 + static_cast<int>(rng.below(3));
        std::vector<int> levels;
        for (int i = 0; i + 1 < n; ++i) levels.push_back(2 + static_cast<int>(rng.below(2)));
        const int class_levels = 2 + static_cast<int>(rng.below(2));
        Schema schema = oracles::make_schema(levels, class_levels);
        const int max_edges = n * (n - 1) / 2;
        const int target = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edges + 1)));
        const ModelGraph graph =
            oracles::random_decomposable_graph(n, target, rng.next());
        Dataset data = oracles::complete_table_dataset(schema, rng.next(), 9);
        cases.push_back({std::move(schema), graph, std::move(data)});
    }
    return cases;
}

Outcome check_closed_form_vs_ipf() {
    double worst_joint = 0.0, worst_marginal = 0.0;
    for (const FitCase& c : fit_suite()) {
        const FittedModel model = fit(c.data, c.graph);
        const std::vector<double> got = dense_joint(model);
        const std::vector<double> want = oracles::ipf_joint(c.data, c.graph, 200);
        for (std::size_t i = 0; i < got.size(); ++i) {
            worst_joint = std::max(worst_joint, std::abs(got[i] - want[i]));
        }

        // Fitted clique marginals must reproduce the observed ones exactly.
        for (const std::vector<int>& clique : decompose(c.graph).cliques) {
            const std::vector<double> observed = oracles::observed_marginal(c.data, clique);
            std::vector<double> fitted(observed.size(), 0.0);
            const std::uint64_t cells = oracles::cell_count(c.schema);
            for (std::uint64_t cell = 0; cell < cells; ++cell) {
                const std::vector<int> inst = oracles::decode_cell(c.schema, cell);
                std::uint64_t idx = 0;
                for (int v : clique) {
                    idx = idx * static_cast<std::uint64_t>(c.schema.levels_of(v)) +
                          static_cast<std::uint64_t>(inst[static_cast<std::size_t>(v)]);
                }
                fitted[static_cast<std::size_t>(idx)] += got[static_cast<std::size_t>(cell)];
            }
            for (std::size_t i = 0; i < observed.size(); ++i) {
                worst_marginal = std::max(worst_marginal, std::abs(fitted[i] - observed[i]));
            }
        }
    }
    const bool pass = worst_joint <= 1e-9 && worst_marginal <= 1e-12;
    return {pass, "max joint dev " + fmt("%.3g", worst_joint) + ", max marginal dev " +
                      fmt("%.3g", worst_marginal)};
}

Outcome check_joint_normalization() {
    double worst = 0.0;
    for (const FitCase& c : fit_suite()) {
        const FittedModel model = fit(c.data, c.graph);
        double sum = 0.0;
        for (double p : dense_joint(model)) sum += p;
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return {worst <= 1e-10, "max |sum-1| " + fmt("%.3g", worst)};
}

Outcome check_deviance() {
    // Saturated fits have exactly zero deviance.
    double worst_saturated = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Schema schema = oracles::make_schema({2, 3}, 2 + static_cast<int>(seed % 2));
        const Dataset data = oracles::random_dataset(schema, 160, seed);
        const ModelGraph sat = boundary_graph(schema.arity(), BoundaryKind::saturated);
        worst_saturated = std::max(worst_saturated, std::abs(g_squared(data, fit(data, sat))));
    }
    if (worst_saturated > 1e-12) {
        return {false, "saturated deviance " + fmt("%.3g", worst_saturated)};
    }

    // Deviance is monotone along nested search paths: nonincreasing as edges
    // are added, nondecreasing as they are removed.
    const Schema schema = fixtures::recovery_schema();
    const SyntheticModel model = fixtures::recovery_model(schema);
    const Dataset data = sample_dataset(model, 2000, 5);
    for (const SearchDirection dir : {SearchDirection::forward, SearchDirection::backward}) {
        SearchConfig config;
        config.direction = dir;
        config.criterion.kind = dir == SearchDirection::forward ? CriterionKind::aic
                                                                : CriterionKind::bic;
        const SearchResult r = select_model(data, config);
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            const double g2 = g_squared(data, fit(data, r.trace[i].chosen_model));
            if (i > 0) {
                const bool ok = dir == SearchDirection::forward ? g2 <= prev + 1e-9
                                                                : g2 >= prev - 1e-9;
                if (!ok) {
                    return {false, "non-monotone deviance at trace level " +
                                       std::to_string(r.trace[i].level)};
                }
            }
            prev = g2;
        }
    }
    return {true, "saturated max " + fmt("%.3g", worst_saturated) + ", traces monotone"};
}

Outcome check_chi_square_cdf() {
    double worst = 0.0;
    for (const int dof : {2, 4, 6, 8}) {
        double prev = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.35 * i;
            const double got = chi_square_cdf(x, dof);
            const double want = 1.0 - chi2_upper_tail_even(x, dof);
            worst = std::max(worst, std::abs(got - want));
            if (got < prev - 1e-14 || got < 0.0 || got > 1.0) {
                return {false, "CDF not monotone in [0,1] at dof " + std::to_string(dof)};
            }
            prev = got;
        }
    }
    return {worst <= 1e-10, "max dev " + fmt("%.3g", worst) + " over 400 points"};
}

Outcome check_exact_calibration() {
    // Data generated under the null: the tested edge is absent, so the
    // conditional-independence significance should be uniform and its mean
    // near one half.
    Schema schema = oracles::make_schema({2, 2}, 2);
    const ModelGraph simpler = parse_model("(F1 S)(F2 S)", schema.variable_names());
    const ModelGraph complex_graph = with_edge(simpler, make_edge(0, 1));
    const SyntheticModel gen = make_synthetic_model(schema, simpler, 404);

    double sum = 0.0;
    const int outer = 200;
    for (int rep = 0; rep < outer; ++rep) {
        const Dataset data =
            sample_dataset(gen, 400, derive_seed(505, 0x63616cull, static_cast<std::uint64_t>(rep)));
        CriterionConfig config;
        config.kind = CriterionKind::exact;
        config.mc_replicates = 199;
        config.seed = derive_seed(606, 0x63616cull, static_cast<std::uint64_t>(rep));
        sum += exact_conditional_significance(data, simpler, complex_graph, config);
    }
    const double mean = sum / outer;
    return {mean >= 0.45 && mean <= 0.55, "mean significance " + fmt("%.4f", mean)};
}

Outcome check_forward_recovery() {
    const Schema schema = fixtures::recovery_schema();
    const SyntheticModel gen = fixtures::recovery_model(schema);
    const ModelGraph truth = parse_model("(F1 S)(F2 F3 S)", schema.variable_names());

    int recovered = 0, bic_not_larger = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Dataset data = sample_dataset(gen, 5000, seed);
        SearchConfig config;
        config.direction = SearchDirection::forward;
        config.criterion.kind = CriterionKind::aic;
        const SearchResult aic = select_model(data, config);
        if (aic.final_model == truth) ++recovered;

        config.criterion.kind = CriterionKind::bic;
        const SearchResult bic = select_model(data, config);
        if (complexity(bic.final_model) <= complexity(aic.final_model)) ++bic_not_larger;
    }
    const bool pass = recovered >= 16 && bic_not_larger >= 18;
    return {pass, "recovered " + std::to_string(recovered) + "/20, bic<=aic " +
                      std::to_string(bic_not_larger) + "/20"};
}

Outcome check_product_form_equivalence() {
    long long contexts = 0;
    for (int features = 1; features <= 3; ++features) {
        Schema schema = oracles::make_schema(std::vector<int>(features, 2), 2);
        const ModelGraph star = naive_bayes_graph(schema);
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            // Alternate dense tables with sparse ones that force abstentions
            // and zero-count senses.
            const Dataset train = seed % 2 == 1
                                      ? oracles::complete_table_dataset(schema, seed, 9)
                                      : oracles::random_dataset(schema, 6, seed);
            const FittedModel model = fit(train, star);
            const long long ctx_cells = 1LL << features;
            for (long long c = 0; c < ctx_cells; ++c) {
                std::vector<int> ctx;
                for (int f = features - 1; f >= 0; --f) {
                    ctx.push_back(static_cast<int>((c >> f) & 1));
                }
                const Prediction got =
                    predict(model, std::span<const int>(ctx.data(), ctx.size()));
                const std::optional<int> want = oracles::naive_bayes_oracle(train, ctx);
                if (got.sense != want) {
                    return {false, "mismatch at features=" + std::to_string(features) +
                                       " seed=" + std::to_string(seed)};
                }
                ++contexts;
            }
        }
    }
    return {true, std::to_string(contexts) + " contexts agree"};
}

Outcome check_metrics_example() {
    // Four test items: two classified correctly, one misclassified, one
    // abstention. Accuracy counts abstentions as errors; recall ignores
    // correctness and measures coverage.
    Schema schema = oracles::make_schema({4}, 2);
    const Dataset test = make_dataset(schema, {
        Row{{0, 0}, 1}, Row{{1, 0}, 1}, Row{{2, 1}, 1}, Row{{3, 0}, 1}});
    const auto predictor = [](std::span<const int> ctx) -> Prediction {
        if (ctx[0] == 3) return Prediction{};
        return Prediction{0};
    };
    const Metrics m = evaluate(predictor, test);
    if (!(m.accuracy == 0.5 && m.recall == 0.75 && m.n_test == 4 && m.n_abstained == 1)) {
        return {false, "got accuracy " + fmt("%.4f", m.accuracy) + ", recall " +
                           fmt("%.4f", m.recall)};
    }

    // The constant default classifier never abstains: recall is always one.
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Schema s2 = oracles::make_schema({3, 2}, 3);
        const Dataset data = oracles::random_dataset(s2, 90, seed);
        const Metrics dm = evaluate(default_classifier(data), data);
        if (dm.recall != 1.0 || dm.n_abstained != 0) {
            return {false, "default baseline abstained at seed " + std::to_string(seed)};
        }
    }
    return {true, "accuracy 0.5000, recall 0.7500, default recall 1"};
}

Outcome check_wide_experiment() {
    const SyntheticModel gen = fixtures::wide_model(2026);
    const Dataset data = sample_dataset(gen, 2000, 424242);
    const std::vector<std::pair<std::string, Dataset>> datasets{{"wide", data}};

    ExperimentOptions opts;
    opts.seed = 11;
    opts.alpha = 1e-4;
    opts.mc_replicates = 199;

    const auto t1 = std::chrono::steady_clock::now();
    const ExperimentReport a = run_experiment(datasets, opts);
    const double first =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

    const auto t2 = std::chrono::steady_clock::now();
    const ExperimentReport b = run_experiment(datasets, opts);
    const double second =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t2).count();

    const std::string tsv_a = report_tsv(a);
    const std::string tsv_b = report_tsv(b);
    if (tsv_a != tsv_b) return {false, "reports differ between identical runs"};
    if (a.cells.size() != 10) return {false, "expected 10 cells"};
    if (first >= 60.0 || second >= 60.0) {
        return {false, "runs took " + fmt("%.1f", first) + "s/" + fmt("%.1f", second) + "s"};
    }
    return {true, "runs " + fmt("%.1f", first) + "s + " + fmt("%.1f", second) +
                      "s, reports identical"};
}

}  // namespace

int main() {
    std::printf("acceptance: closed-form decomposable-model induction\n");
    criterion(1, "chordality-vs-subset-scan", 1.0, check_chordality_oracle);
    criterion(2, "neighbor-enumeration", 5.0, check_neighbor_enumeration);
    criterion(3, "closed-form-vs-ipf", 30.0, check_closed_form_vs_ipf);
    criterion(4, "joint-normalization", 30.0, check_joint_normalization);
    criterion(5, "deviance-identities", 30.0, check_deviance);
    criterion(6, "chi-square-cdf", 10.0, check_chi_square_cdf);
    criterion(7, "exact-test-calibration", 120.0, check_exact_calibration);
    criterion(8, "forward-recovery", 120.0, check_forward_recovery);
    criterion(9, "product-form-equivalence", 30.0, check_product_form_equivalence);
    criterion(10, "abstention-metrics", 10.0, check_metrics_example);
    criterion(11, "wide-experiment", 130.0, check_wide_experiment);

    if (g_failures > 0) {
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
}
