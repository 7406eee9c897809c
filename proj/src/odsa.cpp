#include "dbnn/odsa.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace dbnn {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Unbiased bounded draw, independent of distribution implementations.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

double percent(std::size_t correct, std::size_t total) {
    // An empty pool is vacuously all-correct.
    return total == 0 ? 100.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<Prediction> predict_all(const TrainedModel& model, const Dataset& d, std::size_t& correct) {
    std::vector<Prediction> predictions;
    predictions.reserve(d.size());
    correct = 0;
    for (const Example& e : d.examples()) {
        predictions.push_back(model.predict(e.features));
        if (predictions.back().predicted == e.label) ++correct;
    }
    return predictions;
}

std::size_t count_correct(const TrainedModel& model, const Dataset& d) {
    std::size_t correct = 0;
    for (const Example& e : d.examples()) {
        if (model.predict(e.features).predicted == e.label) ++correct;
    }
    return correct;
}

void validate_selection_input(const Dataset& d) {
    if (d.class_count() < 2) {
        throw Error("selection requires at least two classes");
    }
    const std::vector<std::size_t> counts = d.class_counts();
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) {
            throw Error("class '" + d.schema().class_names[k] + "' has no examples");
        }
    }
}

}  // namespace

SelectionState initialize_selection(const Dataset& d, std::uint64_t seed) {
    validate_selection_input(d);

    std::mt19937_64 rng(seed);
    const std::size_t k = d.class_count();
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < d.size(); ++i) {
        by_class[static_cast<std::size_t>(d[i].label)].push_back(i);
    }

    SelectionState state;
    state.seed = seed;
    state.round = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const auto& pool = by_class[c];
        state.train_indices.push_back(pool[uniform_index(rng, pool.size())]);
    }

    std::vector<char> taken(d.size(), 0);
    for (std::size_t i : state.train_indices) taken[i] = 1;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!taken[i]) state.test_indices.push_back(i);
    }
    state.train_pool = subset(d, state.train_indices);
    state.test_pool = subset(d, state.test_indices);
    return state;
}

std::vector<std::size_t> select_failures(const std::vector<Prediction>& predictions, const Dataset& pool) {
    if (predictions.size() != pool.size()) {
        throw Error("select_failures: predictions are not aligned with the pool");
    }
    const std::size_t k = pool.class_count();
    std::vector<std::size_t> best(k, kNone);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const Example& e = pool[i];
        if (predictions[i].predicted == e.label) continue;
        const std::size_t c = static_cast<std::size_t>(e.label);
        if (best[c] == kNone) {
            best[c] = i;
            continue;
        }
        const Prediction& cur = predictions[i];
        const Prediction& top = predictions[best[c]];
        if (cur.confidence > top.confidence ||
            (cur.confidence == top.confidence && e.source_index < pool[best[c]].source_index)) {
            best[c] = i;
        }
    }
    std::vector<std::size_t> picked;
    for (std::size_t c = 0; c < k; ++c) {
        if (best[c] != kNone) picked.push_back(best[c]);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

SelectionReport run_odsa(const Dataset& d, const SelectionConfig& config) {
    // Bin boundaries come from the complete dataset and stay fixed while the
    // pools change, so bin identities are stable across rounds.
    const BinningSchema schema = infer_schema(d, config.binning);
    const std::size_t max_rounds = config.max_rounds == 0 ? d.size() : config.max_rounds;

    SelectionState state = initialize_selection(d, config.seed);

    SelectionReport report;
    report.train_indices = state.train_indices;
    report.train_round_added.assign(state.train_indices.size(), 0);
    report.test_indices = state.test_indices;

    int round = 0;
    while (true) {
        const Dataset train_pool = subset(d, report.train_indices);
        const Dataset test_pool = subset(d, report.test_indices);

        report.model = train(train_pool, schema, config.alpha, config.iterations);

        const std::size_t train_correct = count_correct(report.model, train_pool);
        std::size_t test_correct = 0;
        const std::vector<Prediction> predictions = predict_all(report.model, test_pool, test_correct);

        report.curve.push_back(CurvePoint{round, percent(train_correct, train_pool.size()),
                                          percent(test_correct, test_pool.size()), train_pool.size(),
                                          test_pool.size()});

        if (test_correct == test_pool.size()) {
            report.converged = true;
            break;
        }
        if (report.curve.size() >= max_rounds) {
            report.converged = false;
            break;
        }

        // Migrate the per-class worst failures from the test pool.
        const std::vector<std::size_t> picked = select_failures(predictions, test_pool);
        std::vector<char> moved(report.test_indices.size(), 0);
        for (std::size_t p : picked) {
            report.train_indices.push_back(report.test_indices[p]);
            report.train_round_added.push_back(round + 1);
            moved[p] = 1;
        }
        std::vector<std::size_t> remaining;
        remaining.reserve(report.test_indices.size() - picked.size());
        for (std::size_t i = 0; i < report.test_indices.size(); ++i) {
            if (!moved[i]) remaining.push_back(report.test_indices[i]);
        }
        report.test_indices = std::move(remaining);
        ++round;
    }

    report.final_train_accuracy = report.curve.back().pseudo_accuracy;
    report.final_test_accuracy = report.curve.back().real_accuracy;
    report.overall_accuracy = percent(count_correct(report.model, d), d.size());
    return report;
}

SelectionReport random_baseline(const Dataset& d, std::size_t train_size, const SelectionConfig& config) {
    if (train_size < 1) throw Error("random_baseline: training sample must hold at least one example");
    if (train_size > d.size()) {
        throw Error("random_baseline: sample size " + std::to_string(train_size) +
                    " exceeds the dataset (" + std::to_string(d.size()) + " examples)");
    }

    const BinningSchema schema = infer_schema(d, config.binning);

    // Partial Fisher-Yates over the index range, then restore dataset order.
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> indices(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) indices[i] = i;
    for (std::size_t i = 0; i < train_size; ++i) {
        const std::size_t j = i + uniform_index(rng, d.size() - i);
        std::swap(indices[i], indices[j]);
    }
    std::vector<std::size_t> picked(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(train_size));
    std::sort(picked.begin(), picked.end());

    SelectionReport report;
    report.train_indices = picked;
    report.train_round_added.assign(picked.size(), 0);
    {
        std::vector<char> taken(d.size(), 0);
        for (std::size_t i : picked) taken[i] = 1;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!taken[i]) report.test_indices.push_back(i);
        }
    }

    const Dataset train_pool = subset(d, report.train_indices);
    const Dataset test_pool = subset(d, report.test_indices);
    report.model = train(train_pool, schema, config.alpha, config.iterations);

    const std::size_t train_correct = count_correct(report.model, train_pool);
    const std::size_t test_correct = count_correct(report.model, test_pool);
    report.curve.push_back(CurvePoint{0, percent(train_correct, train_pool.size()),
                                      percent(test_correct, test_pool.size()), train_pool.size(),
                                      test_pool.size()});
    report.final_train_accuracy = report.curve.back().pseudo_accuracy;
    report.final_test_accuracy = report.curve.back().real_accuracy;
    report.overall_accuracy = percent(count_correct(report.model, d), d.size());
    report.converged = test_correct == test_pool.size();
    return report;
}

}  // namespace dbnn
