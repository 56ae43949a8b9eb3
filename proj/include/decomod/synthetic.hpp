#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "chordal.hpp"
#include "common.hpp"
#include "rng.hpp"
#include "schema.hpp"

namespace decomod {

// One junction-tree factor: the conditional law of the clique's new variables
// given its separator. probs holds sep_cells rows of new_cells entries, each
// row a distribution; variables index their cells ascending with the last
// variable fastest, matching the dense layout used for user-supplied tables.
struct CliqueFactor {
    std::vector<int> sep_vars;
    std::vector<int> new_vars;
    std::uint64_t sep_cells = 1;
    std::uint64_t new_cells = 1;
    std::vector<double> probs;
};

// A decomposable joint distribution in sampled form: p(x) is the product of
// the factors' conditionals along a running-intersection clique order.
struct SyntheticModel {
    Schema schema;
    ModelGraph graph;
    std::vector<CliqueFactor> factors;
};

namespace detail {

inline std::uint64_t cells_over(const Schema& schema, const std::vector<int>& vars,
                                const char* what) {
    std::uint64_t n = 1;
    for (int v : vars) {
        n = checked_product(n, static_cast<std::uint64_t>(schema.levels_of(v)), what);
    }
    return n;
}

inline std::uint64_t index_over(const Schema& schema, const std::vector<int>& vars,
                                std::span<const int> instance) {
    std::uint64_t idx = 0;
    for (int v : vars) {
        idx = idx * static_cast<std::uint64_t>(schema.levels_of(v)) +
              static_cast<std::uint64_t>(instance[static_cast<std::size_t>(v)]);
    }
    return idx;
}

inline std::vector<CliqueFactor> factor_shapes(const Schema& schema, const ModelGraph& graph) {
    if (graph.n != schema.arity()) throw model_error("graph does not match schema arity");
    Decomposition dec = decompose(graph);
    std::vector<CliqueFactor> factors;
    for (std::size_t j = 0; j < dec.cliques.size(); ++j) {
        CliqueFactor f;
        if (j > 0) f.sep_vars = dec.separators[j - 1];
        std::set_difference(dec.cliques[j].begin(), dec.cliques[j].end(), f.sep_vars.begin(),
                            f.sep_vars.end(), std::back_inserter(f.new_vars));
        f.sep_cells = cells_over(schema, f.sep_vars, "separator cell space");
        f.new_cells = cells_over(schema, f.new_vars, "clique cell space");
        checked_product(f.sep_cells, f.new_cells, "clique cell space");
        factors.push_back(std::move(f));
    }
    return factors;
}

}  // namespace detail

// Random generating distribution: every conditional row gets independent
// uniform weights, normalized. Deterministic in the seed.
inline SyntheticModel make_synthetic_model(const Schema& schema, const ModelGraph& graph,
                                           std::uint64_t seed) {
    SyntheticModel m{schema, graph, detail::factor_shapes(schema, graph)};
    for (std::size_t j = 0; j < m.factors.size(); ++j) {
        CliqueFactor& f = m.factors[j];
        f.probs.resize(static_cast<std::size_t>(f.sep_cells * f.new_cells));
        Rng rng(derive_seed(seed, 0x7461626c65ull, static_cast<std::uint64_t>(j)));
        for (std::uint64_t s = 0; s < f.sep_cells; ++s) {
            double total = 0.0;
            const std::size_t base = static_cast<std::size_t>(s * f.new_cells);
            for (std::uint64_t c = 0; c < f.new_cells; ++c) {
                const double w = rng.unit();
                f.probs[base + static_cast<std::size_t>(c)] = w;
                total += w;
            }
            for (std::uint64_t c = 0; c < f.new_cells; ++c) {
                if (total > 0.0) {
                    f.probs[base + static_cast<std::size_t>(c)] /= total;
                } else {
                    f.probs[base + static_cast<std::size_t>(c)] =
                        1.0 / static_cast<double>(f.new_cells);
                }
            }
        }
    }
    return m;
}

// Generating distribution from user tables, one dense nonnegative table per
// clique in decomposition order (clique members ascending, last fastest).
// The first clique's table acts as its marginal; later tables are read as
// conditionals by normalizing within each separator slice.
inline SyntheticModel make_synthetic_model(const Schema& schema, const ModelGraph& graph,
                                           const std::vector<std::vector<double>>& tables) {
    SyntheticModel m{schema, graph, detail::factor_shapes(schema, graph)};
    Decomposition dec = decompose(graph);
    if (tables.size() != m.factors.size()) {
        throw config_error("expected " + std::to_string(m.factors.size()) +
                           " clique tables, got " + std::to_string(tables.size()));
    }
    for (std::size_t j = 0; j < m.factors.size(); ++j) {
        CliqueFactor& f = m.factors[j];
        const std::vector<double>& table = tables[j];
        const std::uint64_t clique_cells = f.sep_cells * f.new_cells;
        if (table.size() != clique_cells) {
            throw config_error("clique table " + std::to_string(j) + " has " +
                               std::to_string(table.size()) + " entries, expected " +
                               std::to_string(clique_cells));
        }
        f.probs.assign(static_cast<std::size_t>(clique_cells), 0.0);

        // Walk the clique's cells with an odometer and scatter weights into
        // (separator row, new-variable column) positions.
        const std::vector<int>& clique = dec.cliques[j];
        std::vector<int> values(clique.size(), 0);
        for (std::size_t cell = 0; cell < table.size(); ++cell) {
            if (!(table[cell] >= 0.0)) {
                throw config_error("clique table entries must be nonnegative");
            }
            std::uint64_t sep_idx = 0, new_idx = 0;
            std::size_t si = 0, ni = 0;
            for (std::size_t k = 0; k < clique.size(); ++k) {
                const int v = clique[k];
                const std::uint64_t level = static_cast<std::uint64_t>(values[k]);
                if (si < f.sep_vars.size() && f.sep_vars[si] == v) {
                    sep_idx = sep_idx * static_cast<std::uint64_t>(schema.levels_of(v)) + level;
                    ++si;
                } else {
                    new_idx = new_idx * static_cast<std::uint64_t>(schema.levels_of(v)) + level;
                    ++ni;
                }
            }
            (void)ni;
            f.probs[static_cast<std::size_t>(sep_idx * f.new_cells + new_idx)] = table[cell];
            for (std::size_t k = clique.size(); k-- > 0;) {
                if (++values[k] < schema.levels_of(clique[k])) break;
                values[k] = 0;
            }
        }
        for (std::uint64_t s = 0; s < f.sep_cells; ++s) {
            const std::size_t base = static_cast<std::size_t>(s * f.new_cells);
            double total = 0.0;
            for (std::uint64_t c = 0; c < f.new_cells; ++c) {
                total += f.probs[base + static_cast<std::size_t>(c)];
            }
            if (!(total > 0.0)) {
                throw config_error("clique table " + std::to_string(j) +
                                   " has a zero separator slice; conditional is undefined");
            }
            for (std::uint64_t c = 0; c < f.new_cells; ++c) {
                f.probs[base + static_cast<std::size_t>(c)] /= total;
            }
        }
    }
    return m;
}

inline double cell_probability(const SyntheticModel& m, std::span<const int> instance) {
    if (static_cast<int>(instance.size()) != m.schema.arity()) {
        throw model_error("instance arity does not match schema");
    }
    double p = 1.0;
    for (const CliqueFactor& f : m.factors) {
        const std::uint64_t s = detail::index_over(m.schema, f.sep_vars, instance);
        const std::uint64_t c = detail::index_over(m.schema, f.new_vars, instance);
        p *= f.probs[static_cast<std::size_t>(s * f.new_cells + c)];
    }
    return p;
}

// N independent draws from the joint, returned as a canonical Dataset.
// Sampling walks the factors in running-intersection order, so each factor's
// separator values are already assigned when it draws its new variables.
inline Dataset sample_dataset(const SyntheticModel& m, long long n, std::uint64_t seed) {
    if (n < 1) throw config_error("sample size must be at least 1");
    std::vector<std::vector<double>> cum;
    cum.reserve(m.factors.size());
    for (const CliqueFactor& f : m.factors) {
        std::vector<double> rows(f.probs.size());
        for (std::uint64_t s = 0; s < f.sep_cells; ++s) {
            const std::size_t base = static_cast<std::size_t>(s * f.new_cells);
            double running = 0.0;
            for (std::uint64_t c = 0; c < f.new_cells; ++c) {
                running += f.probs[base + static_cast<std::size_t>(c)];
                rows[base + static_cast<std::size_t>(c)] = running;
            }
        }
        cum.push_back(std::move(rows));
    }

    Rng rng(derive_seed(seed, 0x73616d706c65ull));
    std::vector<Row> rows;
    rows.reserve(static_cast<std::size_t>(n));
    std::vector<int> values(static_cast<std::size_t>(m.schema.arity()));
    for (long long i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m.factors.size(); ++j) {
            const CliqueFactor& f = m.factors[j];
            const std::uint64_t s = detail::index_over(m.schema, f.sep_vars, values);
            const std::size_t base = static_cast<std::size_t>(s * f.new_cells);
            const double total = cum[j][base + static_cast<std::size_t>(f.new_cells - 1)];
            const double u = rng.unit() * total;
            const auto first = cum[j].begin() + static_cast<std::ptrdiff_t>(base);
            const auto last = first + static_cast<std::ptrdiff_t>(f.new_cells);
            std::uint64_t c = static_cast<std::uint64_t>(std::upper_bound(first, last, u) - first);
            if (c >= f.new_cells) c = f.new_cells - 1;  // float drift guard
            for (std::size_t k = f.new_vars.size(); k-- > 0;) {
                const int v = f.new_vars[k];
                const std::uint64_t levels = static_cast<std::uint64_t>(m.schema.levels_of(v));
                values[static_cast<std::size_t>(v)] = static_cast<int>(c % levels);
                c /= levels;
            }
        }
        rows.push_back(Row{values, 1});
    }
    return make_dataset(m.schema, std::move(rows));
}

// Parses "F1=2,F2=25,S=6" into a schema, moving `class_name` to the class
// slot. Level labels are "0".."k-1".
inline Schema parse_level_spec(const std::string& text, const std::string& class_name) {
    Schema schema;
    bool found_class = false;
    FeatureVariable class_var;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty()) {
            if (start > text.size()) break;
            throw config_error("empty entry in level spec");
        }
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw config_error("level spec entries must look like NAME=COUNT: '" + item + "'");
        }
        FeatureVariable var;
        var.name = item.substr(0, eq);
        long long count = 0;
        try {
            std::size_t used = 0;
            count = std::stoll(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw config_error("bad level count in '" + item + "'");
        }
        if (count < 1 || count > 1000000) {
            throw config_error("level count out of range in '" + item + "'");
        }
        for (long long v = 0; v < count; ++v) var.levels.push_back(std::to_string(v));
        if (var.name == class_name) {
            class_var = std::move(var);
            found_class = true;
        } else {
            schema.features.push_back(std::move(var));
        }
    }
    if (!found_class) {
        throw config_error("class variable '" + class_name + "' missing from level spec");
    }
    schema.class_var = std::move(class_var);
    validate_schema(schema);
    return schema;
}

}  // namespace decomod
