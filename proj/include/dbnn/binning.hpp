#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "dbnn/dataset.hpp"

namespace dbnn {

struct FeatureBinning {
    std::size_t bin_count = 1;  // >= 1
    double lo = 0.0;
    double hi = 0.0;            // lo <= hi

    bool operator==(const FeatureBinning&) const = default;
};

// Per-feature equal-width binning over [lo, hi]. Values outside the range
// clamp to the edge bins, so any finite value maps to a valid bin even when
// prediction-time data exceeds the training range.
class BinningSchema {
public:
    BinningSchema() = default;
    explicit BinningSchema(std::vector<FeatureBinning> per_feature);

    std::size_t feature_count() const { return per_feature_.size(); }
    const FeatureBinning& feature(std::size_t i) const { return per_feature_[i]; }

    // floor(M * (value - lo) / (hi - lo)) clamped to [0, M-1]; bin 0 when
    // lo == hi. Non-finite values are rejected.
    std::size_t bin(std::size_t feature_index, double value) const;

    std::vector<std::size_t> bin_all(std::span<const double> features) const;

    bool operator==(const BinningSchema&) const = default;

private:
    std::vector<FeatureBinning> per_feature_;
};

struct BinningOptions {
    // Explicit bin counts by feature index; an override is used verbatim and
    // bypasses both the sqrt rule and the cap.
    std::map<std::size_t, std::size_t> bin_overrides;
    std::size_t bin_cap = 32;
};

// Bin count per feature is round(sqrt(N)) for N distinct values, floored at 2
// whenever N >= 2 (so binary features stay separable) and capped at
// options.bin_cap. Boundaries are the feature's min/max over d. Deterministic
// for identical inputs.
BinningSchema infer_schema(const Dataset& d, const BinningOptions& options = {});

}  // namespace dbnn
