#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "chordal.hpp"
#include "classify.hpp"
#include "common.hpp"
#include "criteria.hpp"
#include "estimate.hpp"
#include "rng.hpp"
#include "schema.hpp"
#include "search.hpp"

namespace decomod {

struct ExperimentOptions {
    Fraction test_fraction{1, 11};
    std::uint64_t seed = 0;
    double alpha = 1e-4;
    int mc_replicates = 999;
    bool literal_alpha_rule = false;
};

struct ExperimentCell {
    std::string dataset;
    std::string direction;  // "fss", "bss", or "-" for baselines
    std::string criterion;  // criterion name or baseline name
    double accuracy = 0.0;
    double recall = 0.0;
    double complexity = 0.0;  // fractional only in the averages rows
    std::string notation;     // model in clique notation, "-" if there is none
};

struct ExperimentReport {
    std::vector<ExperimentCell> cells;
};

namespace detail {

inline std::string cell_label(const ExperimentCell& c) {
    return c.direction == "-" ? c.criterion : c.direction + "_" + c.criterion;
}

inline std::string format_fixed(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace detail

// Runs the full comparison on each named dataset: a seeded train/test split,
// the two baselines, and the eight direction x criterion selections, all
// evaluated on the held-out share. With several datasets an "average" block
// of arithmetic means per method is appended. The split and every stochastic
// criterion draw its own stream from (seed, role, dataset index), so cells
// can be computed in any order and a rerun is identical.
inline ExperimentReport run_experiment(const std::vector<std::pair<std::string, Dataset>>& datasets,
                                       const ExperimentOptions& opts) {
    if (datasets.empty()) throw config_error("no datasets given");
    static const char* kDirections[2] = {"fss", "bss"};
    static const char* kCriteria[4] = {"chi2", "exact", "aic", "bic"};

    ExperimentReport report;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const std::string& name = datasets[di].first;
        const Dataset& full = datasets[di].second;
        const auto wrap = [&name](const std::string& method, const error& e) {
            return error(e.category(), "cell " + name + "/" + method + ": " + e.message());
        };

        std::pair<Dataset, Dataset> shares = [&] {
            try {
                return split(full, opts.test_fraction,
                             derive_seed(opts.seed, 0x73706c6974ull, di));
            } catch (const error& e) {
                throw wrap("split", e);
            }
        }();
        const Dataset& train = shares.first;
        const Dataset& test = shares.second;
        const std::vector<std::string> names = full.schema.variable_names();

        try {
            const Metrics m = evaluate(default_classifier(train), test);
            report.cells.push_back({name, "-", "default", m.accuracy, m.recall, 0.0, "-"});
        } catch (const error& e) {
            throw wrap("default", e);
        }
        try {
            const FittedModel nb = fit(train, naive_bayes_graph(full.schema));
            const Metrics m = evaluate(nb, test);
            report.cells.push_back({name, "-", "naive_bayes", m.accuracy, m.recall,
                                    static_cast<double>(complexity(nb.graph)),
                                    format_model(nb.graph, names)});
        } catch (const error& e) {
            throw wrap("naive_bayes", e);
        }

        for (int d = 0; d < 2; ++d) {
            for (int c = 0; c < 4; ++c) {
                const std::string method = std::string(kDirections[d]) + "_" + kCriteria[c];
                try {
                    static const CriterionKind kKinds[4] = {CriterionKind::chi2,
                                                            CriterionKind::exact,
                                                            CriterionKind::aic,
                                                            CriterionKind::bic};
                    SearchConfig config;
                    config.direction = d == 0 ? SearchDirection::forward : SearchDirection::backward;
                    config.criterion.kind = kKinds[c];
                    config.criterion.alpha = opts.alpha;
                    config.criterion.mc_replicates = opts.mc_replicates;
                    config.criterion.seed =
                        derive_seed(opts.seed, 0x63656c6cull, static_cast<std::uint64_t>(d * 4 + c),
                                    di);
                    config.literal_alpha_rule = opts.literal_alpha_rule;

                    const SearchResult result = select_model(train, config);
                    const FittedModel fitted = fit(train, result.final_model);
                    const Metrics m = evaluate(fitted, test);
                    report.cells.push_back({name, kDirections[d], kCriteria[c], m.accuracy,
                                            m.recall,
                                            static_cast<double>(complexity(result.final_model)),
                                            format_model(result.final_model, names)});
                } catch (const error& e) {
                    throw wrap(method, e);
                }
            }
        }
    }

    if (datasets.size() > 1) {
        const std::size_t per_dataset = 10;
        for (std::size_t m = 0; m < per_dataset; ++m) {
            ExperimentCell avg;
            avg.dataset = "average";
            avg.direction = report.cells[m].direction;
            avg.criterion = report.cells[m].criterion;
            avg.notation = "-";
            for (std::size_t di = 0; di < datasets.size(); ++di) {
                const ExperimentCell& c = report.cells[di * per_dataset + m];
                avg.accuracy += c.accuracy;
                avg.recall += c.recall;
                avg.complexity += c.complexity;
            }
            const double k = static_cast<double>(datasets.size());
            avg.accuracy /= k;
            avg.recall /= k;
            avg.complexity /= k;
            report.cells.push_back(std::move(avg));
        }
    }
    return report;
}

// Machine-readable rendering: one tab-separated row per cell.
inline std::string report_tsv(const ExperimentReport& report) {
    std::string out = "dataset\tdirection\tcriterion\taccuracy\trecall\tcomplexity\tmodel\n";
    for (const ExperimentCell& c : report.cells) {
        out += c.dataset;
        out += '\t';
        out += c.direction;
        out += '\t';
        out += c.criterion;
        out += '\t';
        out += detail::format_fixed(c.accuracy, "%.4f");
        out += '\t';
        out += detail::format_fixed(c.recall, "%.4f");
        out += '\t';
        out += detail::format_fixed(c.complexity, "%g");
        out += '\t';
        out += c.notation;
        out += '\n';
    }
    return out;
}

// Aligned rendering in the accuracy-table style: one row per method, the
// accuracy followed by the model complexity in parentheses.
inline std::string report_aligned(const ExperimentReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"dataset", "method", "accuracy (cplx)", "recall", "model"});
    for (const ExperimentCell& c : report.cells) {
        std::string acc = detail::format_fixed(c.accuracy, "%.4f");
        acc += " (" + detail::format_fixed(c.complexity, "%g") + ")";
        rows.push_back({c.dataset, detail::cell_label(c), acc,
                        detail::format_fixed(c.recall, "%.4f"), c.notation});
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            width[i] = std::max(width[i], row[i].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            if (i + 1 < row.size()) {
                out.append(width[i] - row[i].size() + 2, ' ');
            }
        }
        out += '\n';
    }
    return out;
}

// Level-by-level trace of one selection run: each visited model is refitted
// to the training share and scored on the test share, giving the data behind
// an accuracy/recall-versus-complexity plot. Trailing comment lines carry
// the final model and why the search stopped.
inline std::string trace_tsv(const SearchResult& result, const Dataset& train,
                             const Dataset& test) {
    const std::vector<std::string> names = train.schema.variable_names();
    std::string out = "level\tedge\tcriterion\taccuracy\trecall\n";
    for (const SearchStep& step : result.trace) {
        const FittedModel fitted = fit(train, step.chosen_model);
        const Metrics m = evaluate(fitted, test);
        out += std::to_string(step.level);
        out += '\t';
        if (step.chosen_edge) {
            out += names[static_cast<std::size_t>(step.chosen_edge->a)] + "-" +
                   names[static_cast<std::size_t>(step.chosen_edge->b)];
        } else {
            out += '-';
        }
        out += '\t';
        out += std::isnan(step.criterion_value)
                   ? "-"
                   : detail::format_fixed(step.criterion_value, "%.6g");
        out += '\t';
        out += detail::format_fixed(m.accuracy, "%.4f");
        out += '\t';
        out += detail::format_fixed(m.recall, "%.4f");
        out += '\n';
    }
    out += "# final\t" + format_model(result.final_model, names) + '\n';
    out += "# stop\t";
    out += stop_reason_name(result.stop.reason);
    out += "\tcandidates=" + std::to_string(result.stop.total_candidates);
    if (result.stop.best_rejected) {
        out += "\trejected=" + names[static_cast<std::size_t>(result.stop.best_rejected->a)] +
               "-" + names[static_cast<std::size_t>(result.stop.best_rejected->b)];
        out += "\tvalue=" + detail::format_fixed(result.stop.best_rejected_value, "%.6g");
    }
    out += '\n';
    return out;
}

}  // namespace decomod
