#include "dbnn/binning.hpp"

#include <algorithm>
#include <cmath>

namespace dbnn {

BinningSchema::BinningSchema(std::vector<FeatureBinning> per_feature)
    : per_feature_(std::move(per_feature)) {
    for (const FeatureBinning& f : per_feature_) {
        if (f.bin_count < 1) throw Error("binning: bin count must be >= 1");
        if (!(f.lo <= f.hi)) throw Error("binning: lo must not exceed hi");
    }
}

std::size_t BinningSchema::bin(std::size_t feature_index, double value) const {
    if (feature_index >= per_feature_.size()) {
        throw Error("binning: feature index " + std::to_string(feature_index) + " out of range");
    }
    if (!std::isfinite(value)) throw Error("binning: non-finite value");
    const FeatureBinning& f = per_feature_[feature_index];
    if (f.bin_count == 1 || f.lo == f.hi) return 0;
    const double scaled = static_cast<double>(f.bin_count) * (value - f.lo) / (f.hi - f.lo);
    if (scaled <= 0.0) return 0;
    const double top = static_cast<double>(f.bin_count - 1);
    if (scaled >= top) return f.bin_count - 1;  // value == hi lands on bin_count; clamp
    return static_cast<std::size_t>(scaled);
}

std::vector<std::size_t> BinningSchema::bin_all(std::span<const double> features) const {
    if (features.size() != per_feature_.size()) {
        throw Error("binning: feature vector has " + std::to_string(features.size()) +
                    " entries, schema expects " + std::to_string(per_feature_.size()));
    }
    std::vector<std::size_t> bins(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) bins[i] = bin(i, features[i]);
    return bins;
}

BinningSchema infer_schema(const Dataset& d, const BinningOptions& options) {
    if (d.empty()) throw Error("infer_schema: dataset is empty");
    if (options.bin_cap < 1) throw Error("infer_schema: bin cap must be >= 1");
    const std::size_t feature_count = d.feature_count();
    for (const auto& [feature, bins] : options.bin_overrides) {
        if (feature >= feature_count) {
            throw Error("infer_schema: bin override for nonexistent feature " + std::to_string(feature));
        }
        if (bins < 1) throw Error("infer_schema: bin override must be >= 1");
    }

    std::vector<FeatureBinning> per_feature(feature_count);
    std::vector<double> column(d.size());
    for (std::size_t f = 0; f < feature_count; ++f) {
        for (std::size_t i = 0; i < d.size(); ++i) column[i] = d[i].features[f];
        std::sort(column.begin(), column.end());
        const std::size_t distinct =
            static_cast<std::size_t>(std::unique(column.begin(), column.end()) - column.begin());

        std::size_t bins;
        if (auto it = options.bin_overrides.find(f); it != options.bin_overrides.end()) {
            bins = it->second;
        } else {
            bins = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(distinct))));
            if (distinct >= 2) bins = std::max<std::size_t>(bins, 2);
            bins = std::clamp<std::size_t>(bins, 1, options.bin_cap);
        }
        per_feature[f] = FeatureBinning{bins, column.front(), column.back()};
    }
    return BinningSchema(std::move(per_feature));
}

}  // namespace dbnn
