#include "dbnn/eval.hpp"

#include <algorithm>
#include <cmath>

namespace dbnn {

std::int64_t ConfusionMatrix::row_total(std::size_t predicted) const {
    std::int64_t total = 0;
    for (std::size_t t = 0; t < class_count_; ++t) total += cell(predicted, t);
    return total;
}

std::int64_t ConfusionMatrix::col_total(std::size_t actual) const {
    std::int64_t total = 0;
    for (std::size_t p = 0; p < class_count_; ++p) total += cell(p, actual);
    return total;
}

std::int64_t ConfusionMatrix::grand_total() const {
    std::int64_t total = 0;
    for (std::int64_t c : cells_) total += c;
    return total;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < class_count_; ++k) total += cell(k, k);
    return total;
}

double ConfusionMatrix::accuracy_percent() const {
    const std::int64_t total = grand_total();
    if (total == 0) return 100.0;
    return 100.0 * static_cast<double>(trace()) / static_cast<double>(total);
}

EvalReport evaluate(const TrainedModel& model, const Dataset& d) {
    if (d.feature_count() != model.feature_count()) {
        throw Error("evaluate: data has " + std::to_string(d.feature_count()) +
                    " features, the model expects " + std::to_string(model.feature_count()));
    }

    // Dataset class ids need not match the model's ordering; map by name.
    std::vector<int> to_model(d.class_count());
    for (std::size_t c = 0; c < d.class_count(); ++c) {
        const std::string& name = d.schema().class_names[c];
        const auto& model_names = model.class_names();
        const auto it = std::find(model_names.begin(), model_names.end(), name);
        if (it == model_names.end()) {
            throw Error("evaluate: data class '" + name + "' is not known to the model");
        }
        to_model[c] = static_cast<int>(it - model_names.begin());
    }

    EvalReport report;
    report.class_names = model.class_names();
    report.matrix = ConfusionMatrix(model.class_count());
    report.predictions.reserve(d.size());
    for (const Example& e : d.examples()) {
        const Prediction p = model.predict(e.features);
        const int truth = to_model[static_cast<std::size_t>(e.label)];
        report.matrix.add(static_cast<std::size_t>(p.predicted), static_cast<std::size_t>(truth));
        report.predictions.push_back(PredictionRecord{e.source_index, truth, p.predicted, p.confidence});
    }
    report.accuracy = report.matrix.accuracy_percent();
    return report;
}

FilteredEvalReport filter_by_confidence(const EvalReport& report, double cutoff) {
    if (report.predictions.empty() && report.matrix.grand_total() > 0) {
        throw Error("filter_by_confidence: report carries no per-prediction records");
    }

    FilteredEvalReport filtered;
    filtered.cutoff = cutoff;
    filtered.report.class_names = report.class_names;
    filtered.report.matrix = ConfusionMatrix(report.class_names.size());
    for (const PredictionRecord& rec : report.predictions) {
        if (rec.confidence > cutoff) {
            filtered.report.predictions.push_back(rec);
            filtered.report.matrix.add(static_cast<std::size_t>(rec.predicted),
                                       static_cast<std::size_t>(rec.true_label));
        }
    }
    filtered.report.accuracy = filtered.report.matrix.accuracy_percent();
    filtered.retained_fraction =
        report.predictions.empty()
            ? 0.0
            : static_cast<double>(filtered.report.predictions.size()) /
                  static_cast<double>(report.predictions.size());
    return filtered;
}

std::vector<std::string> DivergenceReport::flagged_classes() const {
    std::vector<std::string> names;
    for (const ClassComparison& c : classes) {
        if (c.status == ComparisonStatus::Flagged) names.push_back(c.class_name);
    }
    return names;
}

DivergenceReport compare_distributions(const EvalReport& synthetic, const EvalReport& observed,
                                       const CompareOptions& options) {
    const std::size_t k = synthetic.class_names.size();
    if (observed.class_names.size() != k) {
        throw Error("compare_distributions: class count mismatch (" + std::to_string(k) + " vs " +
                    std::to_string(observed.class_names.size()) + ")");
    }
    if (synthetic.class_names != observed.class_names) {
        throw Error("compare_distributions: the reports cover different class sets");
    }

    DivergenceReport report;
    report.tv_threshold = options.tv_threshold;
    report.min_support = options.min_support;
    for (std::size_t c = 0; c < k; ++c) {
        ClassComparison cmp;
        cmp.class_id = static_cast<int>(c);
        cmp.class_name = synthetic.class_names[c];
        cmp.support_synthetic = static_cast<std::size_t>(synthetic.matrix.col_total(c));
        cmp.support_observed = static_cast<std::size_t>(observed.matrix.col_total(c));

        if (cmp.support_synthetic > 0 && cmp.support_observed > 0) {
            const double sa = static_cast<double>(cmp.support_synthetic);
            const double sb = static_cast<double>(cmp.support_observed);
            double tv = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                tv += std::abs(static_cast<double>(synthetic.matrix.cell(p, c)) / sa -
                               static_cast<double>(observed.matrix.cell(p, c)) / sb);
            }
            cmp.tv_distance = 0.5 * tv;
            cmp.recall_synthetic = static_cast<double>(synthetic.matrix.cell(c, c)) / sa;
            cmp.recall_observed = static_cast<double>(observed.matrix.cell(c, c)) / sb;
        }

        const bool thin = cmp.support_observed < options.min_support ||
                          cmp.support_synthetic == 0 || cmp.support_observed == 0;
        if (thin) {
            cmp.status = ComparisonStatus::InsufficientSupport;
        } else if (cmp.tv_distance > options.tv_threshold) {
            cmp.status = ComparisonStatus::Flagged;
        } else {
            cmp.status = ComparisonStatus::Ok;
        }
        report.classes.push_back(std::move(cmp));
    }
    return report;
}

}  // namespace dbnn
