#include "dbnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "text_util.hpp"

namespace dbnn {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

int DatasetSchema::class_id(std::string_view name) const {
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (class_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

Dataset::Dataset(DatasetSchema schema, std::vector<Example> examples)
    : schema_(std::move(schema)), examples_(std::move(examples)) {
    const int k = static_cast<int>(schema_.class_count());
    for (const Example& e : examples_) {
        if (e.features.size() != schema_.feature_count) {
            throw Error("dataset: example has " + std::to_string(e.features.size()) +
                        " features, schema expects " + std::to_string(schema_.feature_count));
        }
        if (e.label < 0 || e.label >= k) {
            throw Error("dataset: example label " + std::to_string(e.label) +
                        " outside the class set (K=" + std::to_string(k) + ")");
        }
        for (double v : e.features) {
            if (!std::isfinite(v)) throw Error("dataset: non-finite feature value");
        }
    }
}

ClassLabel Dataset::class_label(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= schema_.class_count()) {
        throw Error("dataset: class id " + std::to_string(id) + " out of range");
    }
    return ClassLabel{id, schema_.class_names[static_cast<std::size_t>(id)]};
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(schema_.class_count(), 0);
    for (const Example& e : examples_) counts[static_cast<std::size_t>(e.label)]++;
    return counts;
}

Dataset ingest_csv(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return ingest_csv(in, path, options);
}

Dataset ingest_csv(std::istream& in, const std::string& origin, const IngestOptions& options) {
    using detail::trim;

    struct Line {
        std::string text;
        std::size_t number;  // 1-based physical line
    };
    std::vector<Line> lines;
    {
        std::string raw;
        std::size_t number = 0;
        while (std::getline(in, raw)) {
            ++number;
            if (trim(raw).empty()) continue;  // blank lines are ignored
            lines.push_back({std::move(raw), number});
        }
    }
    if (lines.empty()) throw Error(origin + ": file is empty");

    const auto first_fields = split_fields(lines.front().text);
    const std::size_t arity = first_fields.size();
    if (arity < 2) {
        throw Error(origin + ":" + std::to_string(lines.front().number) +
                    ": need at least one feature column and a class column");
    }
    const std::size_t feature_count = arity - 1;
    const std::size_t class_col = options.class_column_first ? 0 : arity - 1;

    bool has_header = false;
    switch (options.header) {
        case HeaderMode::Present: has_header = true; break;
        case HeaderMode::Absent: has_header = false; break;
        case HeaderMode::Auto: {
            // A data row has numeric values in every feature field; a
            // non-numeric name there marks the first line as a header. Empty
            // and "?" tokens are missing data, not column names, so they fall
            // through to the data-row error path.
            for (std::size_t c = 0; c < arity; ++c) {
                if (c == class_col) continue;
                const std::string_view token = trim(first_fields[c]);
                if (token.empty() || token == "?") continue;
                double v;
                if (!detail::parse_double(token, v)) {
                    has_header = true;
                    break;
                }
            }
            break;
        }
    }

    DatasetSchema schema;
    schema.feature_count = feature_count;
    if (has_header) {
        for (std::size_t c = 0; c < arity; ++c) {
            if (c == class_col) {
                schema.class_column_name = std::string(trim(first_fields[c]));
            } else {
                schema.feature_names.emplace_back(trim(first_fields[c]));
            }
        }
    }

    std::unordered_map<std::string, int> class_ids;
    if (!options.classes.empty()) {
        for (const std::string& name : options.classes) {
            if (!class_ids.emplace(name, static_cast<int>(schema.class_names.size())).second) {
                throw Error(origin + ": duplicate class '" + name + "' in the declared class list");
            }
            schema.class_names.push_back(name);
        }
    }

    std::vector<Example> examples;
    examples.reserve(lines.size());
    for (std::size_t li = has_header ? 1 : 0; li < lines.size(); ++li) {
        const std::string where = origin + ":" + std::to_string(lines[li].number);
        const auto fields = split_fields(lines[li].text);
        if (fields.size() != arity) {
            throw Error(where + ": expected " + std::to_string(arity) + " fields, got " +
                        std::to_string(fields.size()));
        }

        Example e;
        e.features.reserve(feature_count);
        for (std::size_t c = 0; c < arity; ++c) {
            if (c == class_col) continue;
            const std::string_view token = trim(fields[c]);
            if (token.empty() || token == "?") {
                throw Error(where + ": missing feature value in column " + std::to_string(c + 1) +
                            " (missing values are not supported)");
            }
            double v;
            if (!detail::parse_double(token, v)) {
                throw Error(where + ": cannot parse '" + std::string(token) + "' as a number (column " +
                            std::to_string(c + 1) + ")");
            }
            if (!std::isfinite(v)) {
                throw Error(where + ": non-finite feature value in column " + std::to_string(c + 1));
            }
            e.features.push_back(v);
        }

        const std::string token(trim(fields[class_col]));
        if (token.empty()) throw Error(where + ": missing class token");
        auto it = class_ids.find(token);
        if (it == class_ids.end()) {
            if (!options.classes.empty()) {
                throw Error(where + ": class '" + token + "' is not in the declared class list");
            }
            it = class_ids.emplace(token, static_cast<int>(schema.class_names.size())).first;
            schema.class_names.push_back(token);
        }
        e.label = it->second;
        e.source_index = examples.size();
        examples.push_back(std::move(e));
    }
    if (examples.empty()) throw Error(origin + ": no data rows");

    return Dataset(std::move(schema), std::move(examples));
}

void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_csv(d, out);
    if (!out.good()) throw Error("failed writing '" + path + "'");
}

void write_csv(const Dataset& d, std::ostream& out) {
    const DatasetSchema& schema = d.schema();
    if (!schema.feature_names.empty()) {
        for (const std::string& name : schema.feature_names) out << name << ',';
        out << schema.class_column_name << '\n';
    }
    for (const Example& e : d.examples()) {
        for (double v : e.features) out << detail::format_double(v) << ',';
        out << schema.class_names[static_cast<std::size_t>(e.label)] << '\n';
    }
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices) {
    std::vector<Example> picked;
    picked.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= d.size()) {
            throw Error("subset: index " + std::to_string(i) + " out of range (size " +
                        std::to_string(d.size()) + ")");
        }
        picked.push_back(d[i]);
    }
    return Dataset(d.schema(), std::move(picked));
}

std::pair<Dataset, Dataset> split_by_indices(const Dataset& d, const std::vector<std::size_t>& indices) {
    std::vector<char> selected(d.size(), 0);
    for (std::size_t i : indices) {
        if (i >= d.size()) {
            throw Error("split_by_indices: index " + std::to_string(i) + " out of range (size " +
                        std::to_string(d.size()) + ")");
        }
        if (selected[i]) throw Error("split_by_indices: duplicate index " + std::to_string(i));
        selected[i] = 1;
    }
    std::vector<Example> first, second;
    first.reserve(indices.size());
    second.reserve(d.size() - indices.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        (selected[i] ? first : second).push_back(d[i]);
    }
    return {Dataset(d.schema(), std::move(first)), Dataset(d.schema(), std::move(second))};
}

}  // namespace dbnn
