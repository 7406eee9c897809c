#pragma once

#include <cstdint>
#include <vector>

#include "dbnn/binning.hpp"
#include "dbnn/dataset.hpp"
#include "dbnn/model.hpp"

namespace dbnn {

// One (train, test) accuracy measurement. Accuracies are percentages; an
// empty pool counts as 100 (vacuously correct).
struct CurvePoint {
    int round = 0;
    double pseudo_accuracy = 0.0;  // on the training pool
    double real_accuracy = 0.0;    // on the evaluation pool
    std::size_t train_size = 0;
    std::size_t test_size = 0;

    bool operator==(const CurvePoint&) const = default;
};

struct SelectionConfig {
    double alpha = 0.9;
    int iterations = 10;
    BinningOptions binning;
    std::uint64_t seed = 0;
    // Safety valve; 0 means one round per example, which never binds before
    // natural termination.
    std::size_t max_rounds = 0;
};

// Pools after the seeding step: one uniformly chosen example per class in the
// training pool, everything else in the evaluation pool. Indices are
// positions in the source dataset.
struct SelectionState {
    Dataset train_pool;
    Dataset test_pool;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    int round = 0;
    std::vector<CurvePoint> curve;
    std::uint64_t seed = 0;
};

struct SelectionReport {
    // Positions in the source dataset. train_indices is ordered by joining
    // round (the seed examples first), with the round recorded alongside.
    std::vector<std::size_t> train_indices;
    std::vector<int> train_round_added;
    std::vector<std::size_t> test_indices;

    std::vector<CurvePoint> curve;
    TrainedModel model;

    double overall_accuracy = 0.0;      // final model over the entire source dataset
    double final_train_accuracy = 0.0;
    double final_test_accuracy = 0.0;

    // True when the run ended with the evaluation pool fully correct.
    bool converged = false;
};

// Requires at least two classes and at least one example of every class.
SelectionState initialize_selection(const Dataset& d, std::uint64_t seed);

// For each true class, the position of the misclassified pool example with
// the highest confidence in its wrong class; ties break toward the lowest
// source_index. Empty result means no errors. Positions are returned sorted.
std::vector<std::size_t> select_failures(const std::vector<Prediction>& predictions, const Dataset& pool);

// The selection loop: train on the training pool, classify the evaluation
// pool, record a curve point, migrate the worst failures, repeat until the
// pool is error-free (or empty, or max_rounds is hit — reported via
// `converged`, not an error). Bin boundaries come from the full dataset once
// and stay fixed across rounds.
SelectionReport run_odsa(const Dataset& d, const SelectionConfig& config = {});

// Comparison target: train on `train_size` uniformly sampled examples and
// report in the same shape as run_odsa (single curve point).
SelectionReport random_baseline(const Dataset& d, std::size_t train_size, const SelectionConfig& config = {});

}  // namespace dbnn
