#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dbnn/error.hpp"

namespace dbnn {

struct ClassLabel {
    int id = 0;
    std::string name;

    bool operator==(const ClassLabel&) const = default;
};

// Feature/class layout shared by every example of a dataset. Class ids are
// dense (0..K-1) in first-seen order unless pinned by an explicit class list.
struct DatasetSchema {
    std::size_t feature_count = 0;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;  // empty when the source had no header
    std::string class_column_name = "class";

    std::size_t class_count() const { return class_names.size(); }

    // -1 when the name is unknown.
    int class_id(std::string_view name) const;

    bool operator==(const DatasetSchema&) const = default;
};

struct Example {
    std::vector<double> features;
    int label = 0;                  // class id, < schema.class_count()
    std::size_t source_index = 0;   // row number in the ingested file (header excluded)

    bool operator==(const Example&) const = default;
};

// Outcome of classifying one feature vector. The posterior is normalized to
// sum 1; confidence is its maximum entry on a 0-100 scale.
struct Prediction {
    int predicted = 0;
    double confidence = 0.0;
    std::vector<double> posterior;

    bool operator==(const Prediction&) const = default;
};

// Immutable ordered collection of labeled feature vectors. Construction
// validates that every example matches the schema (arity, label range,
// finite values); instances are safe for concurrent reads afterwards.
class Dataset {
public:
    Dataset() = default;
    Dataset(DatasetSchema schema, std::vector<Example> examples);

    const DatasetSchema& schema() const { return schema_; }
    const std::vector<Example>& examples() const { return examples_; }
    const Example& operator[](std::size_t i) const { return examples_[i]; }

    std::size_t size() const { return examples_.size(); }
    bool empty() const { return examples_.empty(); }
    std::size_t feature_count() const { return schema_.feature_count; }
    std::size_t class_count() const { return schema_.class_count(); }

    ClassLabel class_label(int id) const;

    // Number of examples per class id.
    std::vector<std::size_t> class_counts() const;

    bool operator==(const Dataset&) const = default;

private:
    DatasetSchema schema_;
    std::vector<Example> examples_;
};

enum class HeaderMode { Auto, Present, Absent };

struct IngestOptions {
    HeaderMode header = HeaderMode::Auto;
    // Class token is the last column by default; set to true for class-first files.
    bool class_column_first = false;
    // Explicit ordered class list. When non-empty it pins the class ids and any
    // row with a token outside the list is rejected.
    std::vector<std::string> classes;
};

// Reads a comma-separated file: F numeric feature fields plus one class token
// per row, optional single header line (auto-detected by non-numeric feature
// fields). Malformed rows, missing values and non-finite numbers are hard
// errors naming the offending line.
Dataset ingest_csv(const std::string& path, const IngestOptions& options = {});
Dataset ingest_csv(std::istream& in, const std::string& origin, const IngestOptions& options = {});

// Canonical class-last layout; header line iff the schema carries feature
// names. Numbers are written in shortest round-trip form, so
// ingest(write(d)) == d.
void write_csv(const Dataset& d, const std::string& path);
void write_csv(const Dataset& d, std::ostream& out);

// Partitions d into (selected, rest). Both halves preserve the relative order
// of d; indices must be unique and in range.
std::pair<Dataset, Dataset> split_by_indices(const Dataset& d, const std::vector<std::size_t>& indices);

// Examples at the given positions, in the given order. source_index values
// are carried over unchanged.
Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices);

}  // namespace dbnn
