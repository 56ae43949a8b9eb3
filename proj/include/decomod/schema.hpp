#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace decomod {

// A categorical variable: name plus its distinct levels in a fixed order.
// Level indices used everywhere else are positions in `levels`.
struct FeatureVariable {
    std::string name;
    std::vector<std::string> levels;
};

// Feature variables plus the class variable. The encoded variable order is
// features first (in input order), class last.
struct Schema {
    std::vector<FeatureVariable> features;
    FeatureVariable class_var;

    int arity() const { return static_cast<int>(features.size()) + 1; }
    int class_index() const { return static_cast<int>(features.size()); }

    const FeatureVariable& variable(int i) const {
        return i == class_index() ? class_var : features[static_cast<std::size_t>(i)];
    }

    int levels_of(int i) const { return static_cast<int>(variable(i).levels.size()); }

    std::vector<std::string> variable_names() const {
        std::vector<std::string> names;
        names.reserve(static_cast<std::size_t>(arity()));
        for (const auto& f : features) names.push_back(f.name);
        names.push_back(class_var.name);
        return names;
    }
};

inline void validate_schema(const Schema& schema) {
    std::vector<std::string> names = schema.variable_names();
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw config_error("duplicate variable name in schema");
    }
    for (int i = 0; i < schema.arity(); ++i) {
        if (schema.variable(i).levels.empty()) {
            throw config_error("variable '" + schema.variable(i).name + "' has no levels");
        }
    }
}

// One distinct instance vector (class value last) with its multiplicity.
struct Row {
    std::vector<int> values;
    long long count = 0;

    friend bool operator==(const Row&, const Row&) = default;
};

// A multiset of instances. Rows are kept sorted and unique so that every
// downstream computation and serialization is order-deterministic.
struct Dataset {
    Schema schema;
    std::vector<Row> rows;
    long long total = 0;
};

inline Dataset make_dataset(Schema schema, std::vector<Row> rows) {
    validate_schema(schema);
    for (const auto& r : rows) {
        if (static_cast<int>(r.values.size()) != schema.arity()) {
            throw config_error("instance arity does not match schema");
        }
        if (r.count <= 0) throw config_error("row multiplicity must be positive");
        for (int i = 0; i < schema.arity(); ++i) {
            int v = r.values[static_cast<std::size_t>(i)];
            if (v < 0 || v >= schema.levels_of(i)) {
                throw config_error("level index out of range for variable '" +
                                   schema.variable(i).name + "'");
            }
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.values < b.values; });
    Dataset d;
    d.schema = std::move(schema);
    for (auto& r : rows) {
        d.total += r.count;
        if (!d.rows.empty() && d.rows.back().values == r.values) {
            d.rows.back().count += r.count;
        } else {
            d.rows.push_back(std::move(r));
        }
    }
    if (d.total < 1) throw config_error("dataset must contain at least one instance");
    return d;
}

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

}  // namespace detail

// Parses delimited text with a mandatory header line. Levels are inventoried
// per column in first-appearance order; the named class column becomes the
// last encoded variable. Line numbers in errors are 1-based.
inline Dataset parse_dataset(std::string_view text, const std::string& class_column,
                             char delimiter = ',') {
    // Split into lines, tolerating trailing newline and CRLF endings.
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string_view line;
        if (pos == std::string_view::npos) {
            line = text.substr(start);
            start = text.size() + 1;
        } else {
            line = text.substr(start, pos - start);
            start = pos + 1;
        }
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();

    if (lines.empty()) throw parse_error("empty input: no header line", 1);

    std::vector<std::string> header = detail::split_fields(lines[0], delimiter);
    {
        std::vector<std::string> sorted = header;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) {
            throw parse_error("duplicate column name '" + *dup + "'", 1);
        }
    }
    int class_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == class_column) class_col = static_cast<int>(i);
    }
    if (class_col < 0) {
        throw parse_error("class column '" + class_column + "' not found in header", 1);
    }
    if (lines.size() < 2) throw parse_error("empty input: no data rows", 2);

    const int ncols = static_cast<int>(header.size());
    // Column order of the encoded schema: features in header order, class last.
    std::vector<int> col_to_var(static_cast<std::size_t>(ncols));
    Schema schema;
    for (int c = 0; c < ncols; ++c) {
        if (c == class_col) {
            col_to_var[static_cast<std::size_t>(c)] = ncols - 1;
            schema.class_var.name = header[static_cast<std::size_t>(c)];
        } else {
            col_to_var[static_cast<std::size_t>(c)] = static_cast<int>(schema.features.size());
            schema.features.push_back({header[static_cast<std::size_t>(c)], {}});
        }
    }

    // level label -> index, one map per encoded variable
    std::vector<std::map<std::string, int>> level_index(static_cast<std::size_t>(ncols));
    std::vector<Row> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        std::vector<std::string> fields = detail::split_fields(lines[li], delimiter);
        if (static_cast<int>(fields.size()) != ncols) {
            throw parse_error("row has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(ncols),
                              static_cast<long>(li + 1));
        }
        Row row;
        row.values.assign(static_cast<std::size_t>(ncols), 0);
        row.count = 1;
        for (int c = 0; c < ncols; ++c) {
            int var = col_to_var[static_cast<std::size_t>(c)];
            auto& idx = level_index[static_cast<std::size_t>(var)];
            const std::string& label = fields[static_cast<std::size_t>(c)];
            auto it = idx.find(label);
            int value;
            if (it == idx.end()) {
                value = static_cast<int>(idx.size());
                idx.emplace(label, value);
                FeatureVariable& fv =
                    var == ncols - 1 ? schema.class_var
                                     : schema.features[static_cast<std::size_t>(var)];
                fv.levels.push_back(label);
            } else {
                value = it->second;
            }
            row.values[static_cast<std::size_t>(var)] = value;
        }
        rows.push_back(std::move(row));
    }
    return make_dataset(std::move(schema), std::move(rows));
}

// Serializes back to delimited text: header (features then class), one line
// per instance with multiplicities expanded, rows in canonical order.
inline std::string write_dataset(const Dataset& dataset, char delimiter = ',') {
    std::string out;
    const Schema& s = dataset.schema;
    for (int i = 0; i < s.arity(); ++i) {
        if (i) out.push_back(delimiter);
        out += s.variable(i).name;
    }
    out.push_back('\n');
    for (const Row& row : dataset.rows) {
        std::string line;
        for (int i = 0; i < s.arity(); ++i) {
            if (i) line.push_back(delimiter);
            line += s.variable(i).levels[static_cast<std::size_t>(
                row.values[static_cast<std::size_t>(i)])];
        }
        line.push_back('\n');
        for (long long k = 0; k < row.count; ++k) out += line;
    }
    return out;
}

// Exact rational test fraction, e.g. {1, 11} for a 10:1 train/test ratio.
struct Fraction {
    long long num = 1;
    long long den = 11;
};

inline Fraction parse_fraction(const std::string& text) {
    std::size_t slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            long long num = std::stoll(text.substr(0, slash));
            long long den = std::stoll(text.substr(slash + 1));
            return {num, den};
        }
        // Decimal form: scale by a power of ten derived from the digits given.
        std::size_t dot = text.find('.');
        if (dot == std::string::npos) return {std::stoll(text), 1};
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        long long den = 1;
        for (std::size_t i = 0; i < text.size() - dot - 1; ++i) {
            den = den * 10;
            if (den > 1000000000000000000LL / 10) throw config_error("fraction too precise");
        }
        return {std::stoll(digits), den};
    } catch (const std::invalid_argument&) {
        throw config_error("cannot parse fraction '" + text + "'");
    } catch (const std::out_of_range&) {
        throw config_error("fraction '" + text + "' out of range");
    }
}

// Seeded train/test split. The partition is a function of the seed only:
// instances are expanded in canonical row order and shuffled with a
// Fisher-Yates pass driven by the shared Rng, then the first
// floor(N * fraction) items form the test share. Both shares keep the full
// schema, so every level observed anywhere stays encodable in both.
inline std::pair<Dataset, Dataset> split(const Dataset& dataset, Fraction test_fraction,
                                         std::uint64_t seed) {
    if (test_fraction.den <= 0 || test_fraction.num <= 0 ||
        test_fraction.num >= test_fraction.den) {
        throw config_error("test fraction must lie strictly between 0 and 1");
    }
    const long long n = dataset.total;
    const long long n_test = static_cast<long long>(
        (static_cast<__int128>(n) * test_fraction.num) / test_fraction.den);

    std::vector<std::uint32_t> items;
    items.reserve(static_cast<std::size_t>(n));
    for (std::uint32_t r = 0; r < dataset.rows.size(); ++r) {
        for (long long k = 0; k < dataset.rows[r].count; ++k) items.push_back(r);
    }
    Rng rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }

    std::vector<Row> test_rows, train_rows;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Row& src = dataset.rows[items[i]];
        auto& dst = (static_cast<long long>(i) < n_test) ? test_rows : train_rows;
        dst.push_back({src.values, 1});
    }
    if (train_rows.empty() || test_rows.empty()) {
        throw config_error("split produced an empty share (N=" + std::to_string(n) + ")");
    }
    return {make_dataset(dataset.schema, std::move(train_rows)),
            make_dataset(dataset.schema, std::move(test_rows))};
}

// Size of the full joint cell space; throws on overflow instead of wrapping.
inline std::uint64_t levels_product(const Schema& schema) {
    std::uint64_t q = 1;
    for (int i = 0; i < schema.arity(); ++i) {
        q = checked_product(q, static_cast<std::uint64_t>(schema.levels_of(i)),
                            "joint cell space");
    }
    return q;
}

}  // namespace decomod
