#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbnn/dataset.hpp"
#include "dbnn/model.hpp"

namespace dbnn {

// K x K grid of prediction counts, rows = predicted class, columns = true
// class (the layout used throughout for visual diffing).
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t class_count)
        : class_count_(class_count), cells_(class_count * class_count, 0) {}

    std::size_t class_count() const { return class_count_; }

    std::int64_t cell(std::size_t predicted, std::size_t actual) const {
        return cells_[predicted * class_count_ + actual];
    }
    void add(std::size_t predicted, std::size_t actual, std::int64_t n = 1) {
        cells_[predicted * class_count_ + actual] += n;
    }

    std::int64_t row_total(std::size_t predicted) const;
    std::int64_t col_total(std::size_t actual) const;
    std::int64_t grand_total() const;
    std::int64_t trace() const;

    // 100 * trace / grand total; 100 for an empty matrix.
    double accuracy_percent() const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t class_count_ = 0;
    std::vector<std::int64_t> cells_;
};

struct PredictionRecord {
    std::size_t source_index = 0;
    int true_label = 0;
    int predicted = 0;
    double confidence = 0.0;

    bool operator==(const PredictionRecord&) const = default;
};

struct EvalReport {
    double accuracy = 0.0;  // percent, consistent with matrix trace
    ConfusionMatrix matrix;
    std::vector<PredictionRecord> predictions;
    std::vector<std::string> class_names;  // the model's classes; ids index these

    bool operator==(const EvalReport&) const = default;
};

struct FilteredEvalReport {
    EvalReport report;
    double cutoff = 0.0;
    double retained_fraction = 0.0;
};

// Classifies every example. Dataset classes are matched to model classes by
// name; unknown names and feature-count mismatches are errors.
EvalReport evaluate(const TrainedModel& model, const Dataset& d);

// Keeps predictions with confidence strictly above the cutoff and recomputes
// the matrix and accuracy over the retained subset.
FilteredEvalReport filter_by_confidence(const EvalReport& report, double cutoff);

enum class ComparisonStatus { Ok, Flagged, InsufficientSupport };

struct ClassComparison {
    int class_id = 0;
    std::string class_name;
    std::size_t support_synthetic = 0;  // column total in the first report
    std::size_t support_observed = 0;   // column total in the second report
    double tv_distance = 0.0;           // in [0, 1]; 0 when either column is empty
    double recall_synthetic = 0.0;      // fractions in [0, 1]
    double recall_observed = 0.0;
    ComparisonStatus status = ComparisonStatus::Ok;
};

struct CompareOptions {
    double tv_threshold = 0.2;
    std::size_t min_support = 5;
};

struct DivergenceReport {
    std::vector<ClassComparison> classes;
    double tv_threshold = 0.2;
    std::size_t min_support = 5;

    std::vector<std::string> flagged_classes() const;
};

// Per true class, the total-variation distance between the column-normalized
// prediction distributions of the two reports, plus recall on each side.
// Classes whose observed support is below min_support (or whose column is
// empty on either side) are marked insufficient-support instead of flagged.
DivergenceReport compare_distributions(const EvalReport& synthetic, const EvalReport& observed,
                                       const CompareOptions& options = {});

}  // namespace dbnn
