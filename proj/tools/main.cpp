#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <decomod/decomod.hpp>

namespace {

using namespace decomod;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("failed while reading '" + path + "'");
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw io_error("failed while writing '" + path + "'");
}

std::string dataset_name(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string format_fixed(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string join_names(const std::vector<int>& indices, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) out += ' ';
        out += names[static_cast<std::size_t>(indices[i])];
    }
    return out;
}

struct CommonFlags {
    std::vector<std::string> data;
    std::string class_col;
    std::string split_text = "1/11";
    std::uint64_t seed = 0;
    std::string direction = "fss";
    std::string criterion = "aic";
    double alpha = 1e-4;
    int mc_replicates = 999;
    bool literal_alpha_rule = false;
    std::string trace_out;
    std::string report_out;
};

void add_data_flags(CLI::App* cmd, CommonFlags& f, bool multi) {
    auto* data = cmd->add_option("--data", f.data, "input dataset file (delimited, header line)");
    data->required();
    if (!multi) data->expected(1);
    cmd->add_option("--class-col", f.class_col, "name of the class column")->required();
    cmd->add_option("--split", f.split_text, "held-out test fraction (default 1/11)");
    cmd->add_option("--seed", f.seed, "seed for the split and any resampling");
}

void add_criterion_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--alpha", f.alpha, "significance cutoff for chi2/exact (default 1e-4)");
    cmd->add_option("--mc-replicates", f.mc_replicates,
                    "Monte Carlo replicates for the exact test (default 999)");
    cmd->add_flag("--literal-alpha-rule", f.literal_alpha_rule,
                  "flip the p-value comparison directions (replication studies)");
}

CriterionKind parse_criterion(const std::string& text) {
    if (text == "aic") return CriterionKind::aic;
    if (text == "bic") return CriterionKind::bic;
    if (text == "chi2") return CriterionKind::chi2;
    if (text == "exact") return CriterionKind::exact;
    throw config_error("unknown criterion '" + text + "' (expected aic|bic|chi2|exact)");
}

SearchDirection parse_direction(const std::string& text) {
    if (text == "fss") return SearchDirection::forward;
    if (text == "bss") return SearchDirection::backward;
    throw config_error("unknown direction '" + text + "' (expected fss|bss)");
}

int run_select(const CommonFlags& f) {
    const Dataset full = parse_dataset(read_file(f.data[0]), f.class_col);
    auto [train, test] = split(full, parse_fraction(f.split_text), derive_seed(f.seed, 0x73706c6974ull, 0));

    SearchConfig config;
    config.direction = parse_direction(f.direction);
    config.criterion.kind = parse_criterion(f.criterion);
    config.criterion.alpha = f.alpha;
    config.criterion.mc_replicates = f.mc_replicates;
    config.criterion.seed = derive_seed(f.seed, 0x736f6c6full, 0);
    config.literal_alpha_rule = f.literal_alpha_rule;

    const SearchResult result = select_model(train, config);
    const FittedModel fitted = fit(train, result.final_model);
    const Metrics m = evaluate(fitted, test);
    const std::vector<std::string> names = full.schema.variable_names();
    const FeatureReport features = feature_report(result, full.schema);

    std::string out;
    out += "final\t" + format_model(result.final_model, names) + '\n';
    out += "complexity\t" + std::to_string(complexity(result.final_model)) + '\n';
    out += "features_retained\t" + join_names(features.retained, names) + '\n';
    out += "features_dropped\t" + join_names(features.dropped, names) + '\n';
    out += "accuracy\t" + format_fixed(m.accuracy, "%.4f") + '\n';
    out += "recall\t" + format_fixed(m.recall, "%.4f") + '\n';
    out += "stop\t" + std::string(stop_reason_name(result.stop.reason)) + '\n';
    std::fputs(out.c_str(), stdout);

    if (!f.trace_out.empty()) write_file(f.trace_out, trace_tsv(result, train, test));
    if (!f.report_out.empty()) write_file(f.report_out, out);
    return 0;
}

int run_experiment_cmd(const CommonFlags& f) {
    std::vector<std::pair<std::string, Dataset>> datasets;
    for (const std::string& path : f.data) {
        datasets.emplace_back(dataset_name(path), parse_dataset(read_file(path), f.class_col));
    }
    ExperimentOptions opts;
    opts.test_fraction = parse_fraction(f.split_text);
    opts.seed = f.seed;
    opts.alpha = f.alpha;
    opts.mc_replicates = f.mc_replicates;
    opts.literal_alpha_rule = f.literal_alpha_rule;

    const ExperimentReport report = run_experiment(datasets, opts);
    std::fputs(report_aligned(report).c_str(), stdout);
    if (!f.report_out.empty()) write_file(f.report_out, report_tsv(report));
    return 0;
}

int run_eval(const CommonFlags& f, const std::string& model_text, const std::string& baseline) {
    if (model_text.empty() == baseline.empty()) {
        throw config_error("eval needs exactly one of --model or --baseline");
    }
    const Dataset full = parse_dataset(read_file(f.data[0]), f.class_col);
    auto [train, test] = split(full, parse_fraction(f.split_text), derive_seed(f.seed, 0x73706c6974ull, 0));
    const std::vector<std::string> names = full.schema.variable_names();

    Metrics m;
    std::string notation = "-";
    double cplx = 0.0;
    if (!baseline.empty()) {
        if (baseline == "default") {
            m = evaluate(default_classifier(train), test);
        } else if (baseline == "naive-bayes") {
            const FittedModel nb = fit(train, naive_bayes_graph(full.schema));
            m = evaluate(nb, test);
            notation = format_model(nb.graph, names);
            cplx = complexity(nb.graph);
        } else {
            throw config_error("unknown baseline '" + baseline + "' (expected default|naive-bayes)");
        }
    } else {
        const ModelGraph graph = parse_model(model_text, names);
        const FittedModel fitted = fit(train, graph);
        m = evaluate(fitted, test);
        notation = format_model(graph, names);
        cplx = complexity(graph);
    }

    std::string out;
    out += "model\t" + notation + '\n';
    out += "complexity\t" + format_fixed(cplx, "%g") + '\n';
    out += "accuracy\t" + format_fixed(m.accuracy, "%.4f") + '\n';
    out += "recall\t" + format_fixed(m.recall, "%.4f") + '\n';
    out += "n_test\t" + std::to_string(m.n_test) + '\n';
    out += "n_abstained\t" + std::to_string(m.n_abstained) + '\n';
    std::fputs(out.c_str(), stdout);
    if (!f.report_out.empty()) write_file(f.report_out, out);
    return 0;
}

int run_gen(const std::string& model_text, const std::string& levels_text,
            const std::string& class_col, long long n, std::uint64_t seed,
            const std::string& tables_path, const std::string& out_path) {
    const Schema schema = parse_level_spec(levels_text, class_col);
    const std::vector<std::string> names = schema.variable_names();
    const ModelGraph graph = parse_model(model_text, names);

    SyntheticModel model = [&] {
        if (tables_path.empty()) return make_synthetic_model(schema, graph, seed);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_file(tables_path));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("bad clique-table JSON: ") + e.what());
        }
        if (doc.is_object() && doc.contains("tables")) doc = doc["tables"];
        if (!doc.is_array()) throw parse_error("clique-table JSON must be an array of arrays");
        std::vector<std::vector<double>> tables;
        for (const auto& item : doc) {
            if (!item.is_array()) throw parse_error("clique-table JSON must be an array of arrays");
            std::vector<double> table;
            for (const auto& v : item) {
                if (!v.is_number()) throw parse_error("clique-table entries must be numbers");
                table.push_back(v.get<double>());
            }
            tables.push_back(std::move(table));
        }
        return make_synthetic_model(schema, graph, tables);
    }();

    const Dataset dataset = sample_dataset(model, n, seed);
    const std::string text = write_dataset(dataset);
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_file(out_path, text);
    }
    std::fprintf(stderr, "generating_model\t%s\nrows\t%lld\n",
                 format_model(graph, names).c_str(), n);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decomposable-model induction of probabilistic classifiers"};
    app.require_subcommand(1);

    CommonFlags sel;
    CLI::App* select_cmd = app.add_subcommand("select", "run one sequential model selection");
    add_data_flags(select_cmd, sel, false);
    select_cmd->add_option("--direction", sel.direction, "search direction: fss|bss (default fss)");
    select_cmd->add_option("--criterion", sel.criterion,
                           "evaluation criterion: aic|bic|chi2|exact (default aic)");
    add_criterion_flags(select_cmd, sel);
    select_cmd->add_option("--trace-out", sel.trace_out, "write the per-level trace here");
    select_cmd->add_option("--report-out", sel.report_out, "also write the summary here");

    CommonFlags exp;
    CLI::App* experiment_cmd =
        app.add_subcommand("experiment", "run all direction x criterion cells plus baselines");
    add_data_flags(experiment_cmd, exp, true);
    add_criterion_flags(experiment_cmd, exp);
    experiment_cmd->add_option("--report-out", exp.report_out, "write the TSV report here");

    CommonFlags evl;
    std::string eval_model, eval_baseline;
    CLI::App* eval_cmd = app.add_subcommand("eval", "fit a fixed model or baseline and score it");
    add_data_flags(eval_cmd, evl, false);
    eval_cmd->add_option("--model", eval_model, "model in clique notation, e.g. \"(F1 S)(F2 F3 S)\"");
    eval_cmd->add_option("--baseline", eval_baseline, "default|naive-bayes");
    eval_cmd->add_option("--report-out", evl.report_out, "also write the summary here");

    std::string gen_model, gen_levels, gen_class, gen_tables, gen_out;
    long long gen_n = 0;
    std::uint64_t gen_seed = 0;
    CLI::App* gen_cmd = app.add_subcommand("gen", "sample a dataset from a known decomposable model");
    gen_cmd->add_option("--model", gen_model, "generating model in clique notation")->required();
    gen_cmd->add_option("--levels", gen_levels, "level spec, e.g. \"F1=2,F2=2,F3=2,S=2\"")->required();
    gen_cmd->add_option("--class-col", gen_class, "name of the class variable")->required();
    gen_cmd->add_option("--n", gen_n, "number of rows to sample")->required();
    gen_cmd->add_option("--seed", gen_seed, "sampling seed");
    gen_cmd->add_option("--tables", gen_tables, "JSON file with one dense table per clique");
    gen_cmd->add_option("--out", gen_out, "output dataset path (stdout if omitted)");

    try {
        app.parse(argc, argv);
        if (select_cmd->parsed()) return run_select(sel);
        if (experiment_cmd->parsed()) return run_experiment_cmd(exp);
        if (eval_cmd->parsed()) return run_eval(evl, eval_model, eval_baseline);
        if (gen_cmd->parsed()) {
            return run_gen(gen_model, gen_levels, gen_class, gen_n, gen_seed, gen_tables, gen_out);
        }
        std::fprintf(stderr, "ERROR usage: no subcommand given\n");
        return 64;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::fprintf(stderr, "ERROR usage: %s\n", e.what());
        return 64;
    } catch (const decomod::error& e) {
        std::fprintf(stderr, "ERROR %s: %s\n", e.category().c_str(), e.message().c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR internal: %s\n", e.what());
        return 3;
    }
}
