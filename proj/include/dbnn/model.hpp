#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dbnn/binning.hpp"
#include "dbnn/dataset.hpp"

namespace dbnn {

// Flat index space over all ordered feature pairs (i, j), i != j. A cell is
// one (anchor bin, other bin) combination; per-class values for a cell are
// stored contiguously (element = cell * K + k).
class PairLayout {
public:
    PairLayout() = default;
    explicit PairLayout(const BinningSchema& schema);

    std::size_t feature_count() const { return bins_.size(); }
    std::size_t bins(std::size_t feature) const { return bins_[feature]; }
    std::size_t cell_count() const { return cells_; }

    std::size_t cell(std::size_t i, std::size_t bin_i, std::size_t j, std::size_t bin_j) const {
        return pair_base_[i * bins_.size() + j] + bin_i * bins_[j] + bin_j;
    }

    bool operator==(const PairLayout&) const = default;

private:
    std::vector<std::size_t> bins_;
    std::vector<std::size_t> pair_base_;  // F*F, one entry per ordered pair
    std::size_t cells_ = 0;
};

// Class-conditional pairwise count tensor. Every cell starts at 1 (Laplace
// base), so an untouched cell yields likelihood exactly 1/K and no likelihood
// is ever zero.
class CountModel {
public:
    CountModel() = default;
    CountModel(BinningSchema schema, std::size_t class_count);
    // Adopts an existing tensor (deserialization); every cell must be >= 1.
    CountModel(BinningSchema schema, std::size_t class_count, std::vector<std::uint32_t> cells);

    void add(const Example& example);

    std::uint32_t count(int k, std::size_t i, std::size_t bin_i, std::size_t j, std::size_t bin_j) const;

    // count(k, cell) / sum over classes of count(k', cell); in (0, 1).
    double likelihood(int k, std::size_t i, std::size_t bin_i, std::size_t j, std::size_t bin_j) const;

    const BinningSchema& schema() const { return schema_; }
    const PairLayout& layout() const { return layout_; }
    std::size_t class_count() const { return class_count_; }

    // Cell-major, class-fast storage (see PairLayout).
    std::span<const std::uint32_t> cells() const { return counts_; }

    bool operator==(const CountModel&) const = default;

private:
    BinningSchema schema_;
    PairLayout layout_;
    std::size_t class_count_ = 0;
    std::vector<std::uint32_t> counts_;
};

// One increment per example per ordered pair on top of the Laplace base.
CountModel accumulate_counts(const Dataset& d, const BinningSchema& schema);

// Per-cell boost weights standing in for the Bayesian prior. Initialized
// uniformly to 1/K; training only ever adds non-negative increments.
struct WeightModel {
    std::vector<double> values;  // same index space as CountModel::cells()
    double alpha = 0.9;
    int iterations = 10;

    bool operator==(const WeightModel&) const = default;
};

// Boost increment for a misclassified example: alpha * (1 - p_true/p_predicted),
// guaranteed in [0, alpha]. Requires 0 < p_true <= p_predicted.
double delta_w(double p_true, double p_predicted, double alpha);

class TrainedModel {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    TrainedModel() = default;
    TrainedModel(CountModel counts, WeightModel weights, std::vector<std::string> class_names);

    // Normalized posterior over classes. score(k) is the product over all
    // ordered feature pairs of likelihood * weight, evaluated in log space
    // and normalized with max-subtraction before exponentiation.
    std::vector<double> posterior(std::span<const double> features) const;

    Prediction predict(std::span<const double> features) const;

    const CountModel& counts() const { return counts_; }
    const WeightModel& weights() const { return weights_; }
    const BinningSchema& schema() const { return counts_.schema(); }
    const std::vector<std::string>& class_names() const { return class_names_; }
    std::size_t class_count() const { return class_names_.size(); }
    std::size_t feature_count() const { return counts_.schema().feature_count(); }
    std::uint32_t format_version() const { return kFormatVersion; }

    // Versioned little-endian binary encoding; load(save(m)) is byte-exact.
    void save(const std::string& path) const;
    void save(std::ostream& out) const;
    static TrainedModel load(const std::string& path);
    static TrainedModel load(std::istream& in, const std::string& origin);

    bool operator==(const TrainedModel&) const;

private:
    CountModel counts_;
    WeightModel weights_;
    std::vector<std::string> class_names_;

    // log(likelihood) and log(likelihood * weight) per element, kept in sync
    // with the weights; posteriors reduce to sums over these tables.
    std::vector<double> log_lik_;
    std::vector<double> log_joint_;

    void rebuild_log_tables();
    std::vector<double> posterior_from_bins(std::span<const std::size_t> bins) const;
    void boost(std::span<const std::size_t> bins, int true_class, double dw);

    friend TrainedModel train(const Dataset&, const BinningSchema&, double, int);
};

// Accumulates counts once, then runs `iterations` in-order passes over d,
// boosting the true class's weights on every cell a misclassified example
// activates. Updates apply immediately within a pass. Deterministic.
TrainedModel train(const Dataset& d, const BinningSchema& schema, double alpha = 0.9, int iterations = 10);

}  // namespace dbnn
