#include <doctest.h>

#include <random>

#include "dbnn/binning.hpp"
#include "helpers/testutil.hpp"

using namespace dbnn;

TEST_CASE("infer_schema applies the sqrt rule with a floor of 2") {
    // two distinct values: round(sqrt(2)) = 1 would destroy the signal
    const BinningSchema xs = infer_schema(testutil::xor_dataset());
    CHECK(xs.feature(0).bin_count == 2);
    CHECK(xs.feature(1).bin_count == 2);
    CHECK(xs.feature(0).lo == 0.0);
    CHECK(xs.feature(0).hi == 1.0);

    // 100 distinct values -> 10 bins
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i % 2);
    }
    const Dataset d = testutil::make_dataset(rows, labels, 2);
    CHECK(infer_schema(d).feature(0).bin_count == 10);

    BinningOptions capped;
    capped.bin_cap = 4;
    CHECK(infer_schema(d, capped).feature(0).bin_count == 4);

    BinningOptions overridden;
    overridden.bin_overrides[0] = 8;
    CHECK(infer_schema(d, overridden).feature(0).bin_count == 8);
    // overrides bypass the cap
    overridden.bin_cap = 4;
    CHECK(infer_schema(d, overridden).feature(0).bin_count == 8);

    overridden.bin_overrides[3] = 8;
    CHECK_THROWS_WITH_AS(infer_schema(d, overridden), doctest::Contains("nonexistent"), Error);
}

TEST_CASE("infer_schema handles constant features") {
    const Dataset d = testutil::make_dataset({{5.0, 1.0}, {5.0, 2.0}}, {0, 1}, 2);
    const BinningSchema s = infer_schema(d);
    CHECK(s.feature(0).bin_count == 1);
    CHECK(s.feature(0).lo == 5.0);
    CHECK(s.feature(0).hi == 5.0);
    CHECK(s.bin(0, 5.0) == 0);
    CHECK(s.bin(0, -100.0) == 0);
}

TEST_CASE("bin_assign follows the equal-width rule with clamping") {
    const BinningSchema s({FeatureBinning{5, 0.0, 10.0}});
    CHECK(s.bin(0, 4.2) == 2);  // floor(5 * 0.42)
    CHECK(s.bin(0, 0.0) == 0);
    CHECK(s.bin(0, 10.0) == 4);
    CHECK(s.bin(0, -3.0) == 0);
    CHECK(s.bin(0, 42.0) == 4);
    CHECK(s.bin(0, 1.9999) == 0);
    CHECK(s.bin(0, 2.0) == 1);

    CHECK_THROWS_AS(s.bin(0, std::numeric_limits<double>::infinity()), Error);
    CHECK_THROWS_AS(s.bin(0, std::numeric_limits<double>::quiet_NaN()), Error);
    CHECK_THROWS_AS(s.bin(1, 0.0), Error);
}

TEST_CASE("binning is monotone and covers every finite value") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lo_dist(-50.0, 50.0);
    std::uniform_real_distribution<double> span_dist(0.0, 100.0);
    std::uniform_real_distribution<double> value_dist(-1e12, 1e12);

    for (int trial = 0; trial < 200; ++trial) {
        const double lo = lo_dist(rng);
        const FeatureBinning fb{1 + rng() % 31, lo, lo + span_dist(rng)};
        const BinningSchema s({fb});

        double v1 = value_dist(rng);
        double v2 = value_dist(rng);
        if (v1 > v2) std::swap(v1, v2);
        const std::size_t b1 = s.bin(0, v1);
        const std::size_t b2 = s.bin(0, v2);
        CHECK(b1 <= b2);
        CHECK(b1 < fb.bin_count);
        CHECK(b2 < fb.bin_count);
    }
}

TEST_CASE("infer_schema is deterministic") {
    const Dataset d = testutil::make_blobs(17, 3, 60, 4, 1.0);
    CHECK(infer_schema(d) == infer_schema(d));
}

TEST_CASE("infer_schema rejects bad input") {
    CHECK_THROWS_AS(infer_schema(Dataset{}), Error);
    BinningOptions options;
    options.bin_cap = 0;
    CHECK_THROWS_AS(infer_schema(testutil::xor_dataset(), options), Error);
}
