#include <doctest.h>

#include <random>
#include <set>

#include "dbnn/eval.hpp"
#include "dbnn/report_io.hpp"
#include "helpers/testutil.hpp"

using namespace dbnn;

#ifndef DBNN_FIXTURE_DIR
#define DBNN_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

EvalReport report_from_matrix(const std::vector<std::vector<std::int64_t>>& rows,
                              std::vector<std::string> names) {
    EvalReport r;
    r.class_names = std::move(names);
    r.matrix = ConfusionMatrix(r.class_names.size());
    for (std::size_t p = 0; p < rows.size(); ++p) {
        for (std::size_t t = 0; t < rows.size(); ++t) r.matrix.add(p, t, rows[p][t]);
    }
    r.accuracy = r.matrix.accuracy_percent();
    return r;
}

}  // namespace

TEST_CASE("evaluate on the training set of a converged model is perfect") {
    const Dataset d = testutil::xor_dataset();
    const TrainedModel m = train(d, infer_schema(d), 0.9, 10);
    const EvalReport r = evaluate(m, d);

    CHECK(r.accuracy == 100.0);
    CHECK(r.matrix.grand_total() == 4);
    CHECK(r.matrix.trace() == 4);
    CHECK(r.predictions.size() == 4);
    CHECK(r.predictions[2].source_index == 2);

    // column totals equal the true class counts
    CHECK(r.matrix.col_total(0) == 2);
    CHECK(r.matrix.col_total(1) == 2);
}

TEST_CASE("evaluate maps dataset classes to model classes by name") {
    const Dataset d = testutil::xor_dataset();
    const TrainedModel m = train(d, infer_schema(d), 0.9, 10);

    // same examples, class ids swapped relative to the model
    DatasetSchema schema;
    schema.feature_count = 2;
    schema.class_names = {"1", "0"};
    std::vector<Example> examples;
    for (const Example& e : d.examples()) {
        examples.push_back(Example{e.features, e.label == 0 ? 1 : 0, e.source_index});
    }
    const EvalReport r = evaluate(m, Dataset(schema, examples));
    CHECK(r.accuracy == 100.0);

    DatasetSchema alien = schema;
    alien.class_names = {"0", "weird"};
    CHECK_THROWS_WITH_AS(evaluate(m, Dataset(alien, examples)), doctest::Contains("not known"), Error);

    const Dataset narrow = testutil::make_dataset({{1.0}}, {0}, 1);
    CHECK_THROWS_WITH_AS(evaluate(m, narrow), doctest::Contains("features"), Error);
}

TEST_CASE("a constant-class model on balanced data scores 50") {
    const Dataset skew = testutil::make_dataset({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
                                                {0, 0, 0, 1}, 2);
    const TrainedModel m = train(skew, infer_schema(skew), 0.9, 1);

    const Dataset balanced = testutil::make_dataset({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
                                                    {0, 0, 1, 1}, 2);
    const EvalReport r = evaluate(m, balanced);
    CHECK(r.accuracy == 50.0);
    // constant prediction: exactly one nonzero row
    const bool constant = (r.matrix.row_total(0) == 4 && r.matrix.row_total(1) == 0) ||
                          (r.matrix.row_total(0) == 0 && r.matrix.row_total(1) == 4);
    CHECK(constant);
}

TEST_CASE("filter_by_confidence retains strictly-above-cutoff predictions") {
    const Dataset d = testutil::make_blobs(3, 3, 90, 3, 1.8);
    const TrainedModel m = train(d, infer_schema(d), 0.9, 5);
    const EvalReport r = evaluate(m, d);

    SUBCASE("cutoff 0 is the identity when all confidences are positive") {
        const FilteredEvalReport f = filter_by_confidence(r, 0.0);
        CHECK(f.report.predictions.size() == r.predictions.size());
        CHECK(f.report.matrix == r.matrix);
        CHECK(f.retained_fraction == 1.0);
    }

    SUBCASE("cutoff 100 drops everything") {
        const FilteredEvalReport f = filter_by_confidence(r, 100.0);
        CHECK(f.report.predictions.empty());
        CHECK(f.retained_fraction == 0.0);
        CHECK(f.report.matrix.grand_total() == 0);
        CHECK(f.report.accuracy == 100.0);  // vacuous
    }

    SUBCASE("retained count is monotone in the cutoff") {
        std::size_t prev = r.predictions.size() + 1;
        for (double cutoff : {0.0, 20.0, 40.0, 56.0, 70.0, 85.0, 99.0}) {
            const FilteredEvalReport f = filter_by_confidence(r, cutoff);
            CHECK(f.report.predictions.size() <= prev);
            prev = f.report.predictions.size();
            // matrix always re-derives from the retained records
            std::int64_t total = 0;
            for (std::size_t p = 0; p < 3; ++p) total += f.report.matrix.row_total(p);
            CHECK(total == static_cast<std::int64_t>(f.report.predictions.size()));
        }
    }

    SUBCASE("filtering favors accuracy when errors sit at low confidence") {
        // brute-force check on the actual report: accuracy over the retained
        // subset at the cutoff never drops when the dropped slice was wrong
        // more often than the kept one.
        const FilteredEvalReport f = filter_by_confidence(r, 56.0);
        std::size_t kept_correct = 0;
        for (const PredictionRecord& rec : r.predictions) {
            if (rec.confidence > 56.0 && rec.predicted == rec.true_label) ++kept_correct;
        }
        CHECK(f.report.matrix.trace() == static_cast<std::int64_t>(kept_correct));
    }
}

TEST_CASE("filter_by_confidence needs per-prediction records") {
    const EvalReport bare = report_from_matrix({{3, 1}, {0, 2}}, {"a", "b"});
    CHECK_THROWS_WITH_AS(filter_by_confidence(bare, 10.0), doctest::Contains("per-prediction"), Error);
}

TEST_CASE("compare_distributions on identical reports is all zero") {
    const EvalReport r = report_from_matrix({{8, 1, 0}, {2, 9, 1}, {0, 0, 10}}, {"a", "b", "c"});
    const DivergenceReport d = compare_distributions(r, r);
    for (const ClassComparison& c : d.classes) {
        CHECK(c.tv_distance == 0.0);
        CHECK(c.status == ComparisonStatus::Ok);
        CHECK(c.recall_synthetic == c.recall_observed);
    }
    CHECK(d.flagged_classes().empty());
}

TEST_CASE("compare_distributions: one-hot vs uniform column is (K-1)/K") {
    const std::vector<std::string> names = {"a", "b", "c", "d"};
    // column "a" concentrated in the correct row vs spread uniformly
    const EvalReport onehot = report_from_matrix(
        {{8, 0, 0, 0}, {0, 8, 0, 0}, {0, 0, 8, 0}, {0, 0, 0, 8}}, names);
    const EvalReport uniform = report_from_matrix(
        {{2, 0, 0, 0}, {2, 8, 0, 0}, {2, 0, 8, 0}, {2, 0, 0, 8}}, names);
    const DivergenceReport d = compare_distributions(onehot, uniform);
    CHECK(d.classes[0].tv_distance == doctest::Approx(3.0 / 4.0));
    CHECK(d.classes[0].status == ComparisonStatus::Flagged);
    CHECK(d.classes[1].tv_distance == 0.0);
}

TEST_CASE("compare_distributions validates the class sets") {
    const EvalReport a = report_from_matrix({{1, 0}, {0, 1}}, {"a", "b"});
    const EvalReport b = report_from_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {"a", "b", "c"});
    CHECK_THROWS_WITH_AS(compare_distributions(a, b), doctest::Contains("mismatch"), Error);

    const EvalReport c = report_from_matrix({{1, 0}, {0, 1}}, {"a", "x"});
    CHECK_THROWS_WITH_AS(compare_distributions(a, c), doctest::Contains("different class sets"), Error);
}

TEST_CASE("tv distances are symmetric") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<std::int64_t>> ma(3, std::vector<std::int64_t>(3));
        std::vector<std::vector<std::int64_t>> mb(3, std::vector<std::int64_t>(3));
        for (auto& row : ma) {
            for (auto& v : row) v = static_cast<std::int64_t>(rng() % 20);
        }
        for (auto& row : mb) {
            for (auto& v : row) v = static_cast<std::int64_t>(rng() % 20);
        }
        const EvalReport a = report_from_matrix(ma, {"a", "b", "c"});
        const EvalReport b = report_from_matrix(mb, {"a", "b", "c"});
        const DivergenceReport ab = compare_distributions(a, b);
        const DivergenceReport ba = compare_distributions(b, a);
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(ab.classes[c].tv_distance == doctest::Approx(ba.classes[c].tv_distance));
        }
    }
}

TEST_CASE("the transcribed stellar tables flag exactly classes 1 and 4") {
    const EvalReport synthetic = read_eval_report(std::string(DBNN_FIXTURE_DIR) + "/synthetic_eval_report.json");
    const EvalReport observed = read_eval_report(std::string(DBNN_FIXTURE_DIR) + "/observed_eval_report.json");

    CHECK(synthetic.accuracy > 99.0);
    CHECK(observed.accuracy == doctest::Approx(100.0 * 156.0 / 229.0));

    const DivergenceReport d = compare_distributions(synthetic, observed);
    CHECK(d.flagged_classes() == std::vector<std::string>{"1", "4"});

    std::set<std::string> insufficient;
    for (const ClassComparison& c : d.classes) {
        if (c.status == ComparisonStatus::InsufficientSupport) insufficient.insert(c.class_name);
    }
    CHECK(insufficient == std::set<std::string>{"5", "6"});
}

TEST_CASE("eval report JSON round trips") {
    const Dataset d = testutil::make_blobs(21, 3, 40, 2, 1.2);
    const TrainedModel m = train(d, infer_schema(d), 0.9, 5);
    const EvalReport r = evaluate(m, d);

    const EvalReport back = eval_report_from_json(eval_report_to_json(r), "roundtrip");
    CHECK(back.class_names == r.class_names);
    CHECK(back.matrix == r.matrix);
    CHECK(back.accuracy == doctest::Approx(r.accuracy));
    CHECK(back.predictions == r.predictions);

    CHECK_THROWS_AS(eval_report_from_json("{not json", "x"), Error);
    CHECK_THROWS_AS(eval_report_from_json("{\"classes\":[\"a\"],\"matrix\":[[1,2]]}", "x"), Error);
    // stated accuracy inconsistent with the matrix
    CHECK_THROWS_WITH_AS(
        eval_report_from_json("{\"classes\":[\"a\",\"b\"],\"accuracy\":10.0,\"matrix\":[[5,0],[0,5]]}", "x"),
        doctest::Contains("inconsistent"), Error);
}

TEST_CASE("matrix text layout carries totals") {
    const EvalReport r = report_from_matrix({{2, 1}, {0, 3}}, {"a", "b"});
    const std::string text = matrix_to_text(r.matrix, r.class_names);
    CHECK(text.find("Label") != std::string::npos);
    CHECK(text.find("Total") != std::string::npos);
    CHECK(text.find("6") != std::string::npos);  // grand total
}
