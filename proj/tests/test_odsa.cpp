#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dbnn/odsa.hpp"
#include "dbnn/report_io.hpp"
#include "helpers/testutil.hpp"

using namespace dbnn;

namespace {

// Every example of d appears exactly once across the two index sets.
void check_partition(const SelectionReport& report, std::size_t size) {
    std::vector<std::size_t> all = report.train_indices;
    all.insert(all.end(), report.test_indices.begin(), report.test_indices.end());
    REQUIRE(all.size() == size);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < size; ++i) REQUIRE(all[i] == i);
}

std::string model_bytes(const TrainedModel& m) {
    std::ostringstream out(std::ios::binary);
    m.save(out);
    return out.str();
}

}  // namespace

TEST_CASE("initialize_selection seeds one example per class") {
    const Dataset d = testutil::make_blobs(2, 3, 150, 4, 1.0);
    const SelectionState state = initialize_selection(d, 42);

    CHECK(state.train_pool.size() == 3);
    CHECK(state.test_pool.size() == 147);
    CHECK(state.round == 0);
    CHECK(state.seed == 42);

    std::set<int> labels;
    for (const Example& e : state.train_pool.examples()) labels.insert(e.label);
    CHECK(labels == std::set<int>{0, 1, 2});

    const SelectionState again = initialize_selection(d, 42);
    CHECK(again.train_indices == state.train_indices);

    const SelectionState other = initialize_selection(d, 43);
    CHECK(other.train_indices != state.train_indices);
}

TEST_CASE("initialize_selection validates its preconditions") {
    // a declared class with no examples
    DatasetSchema schema;
    schema.feature_count = 1;
    schema.class_names = {"a", "b", "c"};
    const Dataset missing(schema, {Example{{1.0}, 0, 0}, Example{{2.0}, 1, 1}});
    CHECK_THROWS_WITH_AS(initialize_selection(missing, 0), doctest::Contains("'c' has no examples"), Error);

    const Dataset single = testutil::make_dataset({{1.0}, {2.0}}, {0, 0}, 1);
    CHECK_THROWS_WITH_AS(initialize_selection(single, 0), doctest::Contains("two classes"), Error);
}

TEST_CASE("select_failures picks the worst failure per true class") {
    const Dataset pool = testutil::make_dataset(
        {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}, {4.0, 0.0}, {5.0, 0.0}},
        {0, 0, 1, 1, 2, 2}, 3);

    const auto pred = [](int predicted, double confidence) {
        return Prediction{predicted, confidence, {}};
    };

    SUBCASE("no failures") {
        const std::vector<Prediction> preds = {pred(0, 90), pred(0, 80), pred(1, 70),
                                               pred(1, 60), pred(2, 95), pred(2, 50)};
        CHECK(select_failures(preds, pool).empty());
    }

    SUBCASE("failures in one class only") {
        const std::vector<Prediction> preds = {pred(0, 90), pred(0, 80), pred(0, 70),
                                               pred(1, 60), pred(2, 95), pred(2, 50)};
        CHECK(select_failures(preds, pool) == std::vector<std::size_t>{2});
    }

    SUBCASE("highest wrong-class confidence wins") {
        const std::vector<Prediction> preds = {pred(1, 80), pred(2, 95), pred(1, 70),
                                               pred(1, 60), pred(2, 95), pred(2, 50)};
        // class 0 fails at rows 0 (conf 80) and 1 (conf 95) -> row 1
        CHECK(select_failures(preds, pool) == std::vector<std::size_t>{1});
    }

    SUBCASE("confidence ties break toward the lowest source index") {
        const std::vector<Prediction> preds = {pred(1, 95), pred(2, 95), pred(1, 70),
                                               pred(1, 60), pred(2, 95), pred(2, 50)};
        CHECK(select_failures(preds, pool) == std::vector<std::size_t>{0});
    }

    SUBCASE("alignment is required") {
        CHECK_THROWS_AS(select_failures({pred(0, 50)}, pool), Error);
    }
}

TEST_CASE("select_failures agrees with a brute-force scan") {
    std::mt19937_64 rng(29);
    const Dataset pool = testutil::make_blobs(6, 4, 60, 2, 1.0);

    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Prediction> preds;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            Prediction p;
            p.predicted = static_cast<int>(rng() % 4);
            p.confidence = static_cast<double>(rng() % 101);
            preds.push_back(p);
        }

        // oracle: exhaustive scan over misclassified examples of each class
        std::vector<std::size_t> expected;
        for (int c = 0; c < 4; ++c) {
            std::size_t best = pool.size();
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (pool[i].label != c || preds[i].predicted == c) continue;
                if (best == pool.size() || preds[i].confidence > preds[best].confidence ||
                    (preds[i].confidence == preds[best].confidence &&
                     pool[i].source_index < pool[best].source_index)) {
                    best = i;
                }
            }
            if (best != pool.size()) expected.push_back(best);
        }
        std::sort(expected.begin(), expected.end());
        CHECK(select_failures(preds, pool) == expected);
    }
}

TEST_CASE("run_odsa solves XOR exhaustively") {
    const Dataset d = testutil::xor_dataset();
    SelectionConfig config;
    config.seed = 1;
    const SelectionReport report = run_odsa(d, config);

    CHECK(report.converged);
    CHECK(report.train_indices.size() <= 4);
    CHECK(report.final_test_accuracy == 100.0);
    CHECK(report.overall_accuracy == 100.0);
    check_partition(report, 4);
}

TEST_CASE("run_odsa terminates, conserves the pools and caps migrations") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t classes = 2 + trial % 4;
        const std::size_t examples = 60 + (rng() % 120);
        const Dataset d = testutil::make_blobs(rng(), classes, examples, 3, 1.4);

        SelectionConfig config;
        config.seed = trial;
        const SelectionReport report = run_odsa(d, config);

        check_partition(report, d.size());
        REQUIRE(!report.curve.empty());
        if (report.converged) CHECK(report.curve.back().real_accuracy == 100.0);

        for (std::size_t r = 1; r < report.curve.size(); ++r) {
            const std::size_t moved = report.curve[r].train_size - report.curve[r - 1].train_size;
            CHECK(moved >= 1);
            CHECK(moved <= classes);
            CHECK(report.curve[r].train_size + report.curve[r].test_size == d.size());
        }
        // round numbers and join rounds are consistent
        CHECK(report.train_round_added.size() == report.train_indices.size());
        CHECK(*std::max_element(report.train_round_added.begin(), report.train_round_added.end()) <=
              report.curve.back().round);
    }
}

TEST_CASE("run_odsa honors max_rounds with a non-converged report") {
    const Dataset d = testutil::make_blobs(55, 3, 200, 3, 2.5);  // heavy overlap
    SelectionConfig config;
    config.max_rounds = 2;
    const SelectionReport report = run_odsa(d, config);
    CHECK_FALSE(report.converged);
    CHECK(report.curve.size() == 2);
    check_partition(report, d.size());
}

TEST_CASE("run_odsa is deterministic") {
    const Dataset d = testutil::make_blobs(77, 3, 120, 3, 1.5);
    SelectionConfig config;
    config.seed = 9;
    const SelectionReport a = run_odsa(d, config);
    const SelectionReport b = run_odsa(d, config);

    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);
    CHECK(a.curve == b.curve);
    CHECK(model_bytes(a.model) == model_bytes(b.model));
    CHECK(selection_report_to_json(a, config) == selection_report_to_json(b, config));
    CHECK(curve_to_csv(a.curve) == curve_to_csv(b.curve));
}

TEST_CASE("random_baseline mirrors the report shape") {
    const Dataset d = testutil::make_blobs(88, 3, 90, 3, 1.0);

    SUBCASE("degenerate full-data sample") {
        const SelectionReport report = random_baseline(d, d.size(), {});
        CHECK(report.test_indices.empty());
        CHECK(report.final_test_accuracy == 100.0);  // vacuous on an empty pool
        CHECK(report.overall_accuracy == report.final_train_accuracy);
        check_partition(report, d.size());
    }

    SUBCASE("sample of K") {
        const SelectionReport report = random_baseline(d, 3, {});
        CHECK(report.train_indices.size() == 3);
        CHECK(report.curve.size() == 1);
        CHECK(report.curve.front().train_size == 3);
        CHECK(report.curve.front().test_size == d.size() - 3);
        check_partition(report, d.size());
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(random_baseline(d, d.size() + 1, {}), Error);
        CHECK_THROWS_AS(random_baseline(d, 0, {}), Error);
    }

    SUBCASE("determinism") {
        SelectionConfig config;
        config.seed = 5;
        CHECK(random_baseline(d, 20, config).train_indices ==
              random_baseline(d, 20, config).train_indices);
    }
}
