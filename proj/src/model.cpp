#include "dbnn/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace dbnn {

namespace {

constexpr std::size_t kNoPair = std::numeric_limits<std::size_t>::max();
constexpr char kMagic[4] = {'D', 'B', 'N', 'N'};

// Little-endian binary helpers for the model file.

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(out, b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(out, b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    put_bytes(out, s.data(), s.size());
}

struct Reader {
    std::istream& in;
    const std::string& origin;

    void bytes(void* data, std::size_t n) {
        in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) {
            throw Error(origin + ": truncated model file");
        }
    }
    std::uint32_t u32() {
        unsigned char b[4];
        bytes(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        unsigned char b[8];
        bytes(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string string() {
        const std::uint32_t n = u32();
        if (n > (1u << 20)) throw Error(origin + ": implausible string length in model file");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
};

}  // namespace

PairLayout::PairLayout(const BinningSchema& schema) {
    const std::size_t f = schema.feature_count();
    bins_.resize(f);
    for (std::size_t i = 0; i < f; ++i) bins_[i] = schema.feature(i).bin_count;
    pair_base_.assign(f * f, kNoPair);
    cells_ = 0;
    for (std::size_t i = 0; i < f; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            if (i == j) continue;
            pair_base_[i * f + j] = cells_;
            cells_ += bins_[i] * bins_[j];
        }
    }
}

CountModel::CountModel(BinningSchema schema, std::size_t class_count)
    : schema_(std::move(schema)),
      layout_(schema_),
      class_count_(class_count),
      counts_(layout_.cell_count() * class_count, 1) {
    if (class_count < 1) throw Error("count model: need at least one class");
}

CountModel::CountModel(BinningSchema schema, std::size_t class_count, std::vector<std::uint32_t> cells)
    : schema_(std::move(schema)), layout_(schema_), class_count_(class_count), counts_(std::move(cells)) {
    if (class_count < 1) throw Error("count model: need at least one class");
    if (counts_.size() != layout_.cell_count() * class_count) {
        throw Error("count model: cell tensor size does not match the schema");
    }
    for (std::uint32_t c : counts_) {
        if (c < 1) throw Error("count model: cell below the Laplace base");
    }
}

void CountModel::add(const Example& example) {
    const std::vector<std::size_t> bins = schema_.bin_all(example.features);
    const std::size_t f = schema_.feature_count();
    const std::size_t k = static_cast<std::size_t>(example.label);
    for (std::size_t i = 0; i < f; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            if (i == j) continue;
            counts_[layout_.cell(i, bins[i], j, bins[j]) * class_count_ + k]++;
        }
    }
}

std::uint32_t CountModel::count(int k, std::size_t i, std::size_t bin_i, std::size_t j,
                                std::size_t bin_j) const {
    if (k < 0 || static_cast<std::size_t>(k) >= class_count_) {
        throw Error("count model: class id out of range");
    }
    if (i == j || i >= schema_.feature_count() || j >= schema_.feature_count() ||
        bin_i >= layout_.bins(i) || bin_j >= layout_.bins(j)) {
        throw Error("count model: cell index out of range");
    }
    return counts_[layout_.cell(i, bin_i, j, bin_j) * class_count_ + static_cast<std::size_t>(k)];
}

double CountModel::likelihood(int k, std::size_t i, std::size_t bin_i, std::size_t j,
                              std::size_t bin_j) const {
    const std::uint32_t numer = count(k, i, bin_i, j, bin_j);  // also validates indices
    const std::size_t base = layout_.cell(i, bin_i, j, bin_j) * class_count_;
    std::uint64_t denom = 0;
    for (std::size_t c = 0; c < class_count_; ++c) denom += counts_[base + c];
    return static_cast<double>(numer) / static_cast<double>(denom);
}

CountModel accumulate_counts(const Dataset& d, const BinningSchema& schema) {
    if (d.empty()) throw Error("accumulate_counts: dataset is empty");
    if (schema.feature_count() != d.feature_count()) {
        throw Error("accumulate_counts: schema covers " + std::to_string(schema.feature_count()) +
                    " features, dataset has " + std::to_string(d.feature_count()));
    }
    CountModel model(schema, d.class_count());
    for (const Example& e : d.examples()) model.add(e);
    return model;
}

double delta_w(double p_true, double p_predicted, double alpha) {
    if (!(p_predicted > 0.0)) throw Error("delta_w: predicted-class probability must be positive");
    if (!(p_true > 0.0) || p_true > p_predicted) {
        throw Error("delta_w: requires 0 < p_true <= p_predicted");
    }
    return alpha * (1.0 - p_true / p_predicted);
}

TrainedModel::TrainedModel(CountModel counts, WeightModel weights, std::vector<std::string> class_names)
    : counts_(std::move(counts)), weights_(std::move(weights)), class_names_(std::move(class_names)) {
    if (class_names_.size() != counts_.class_count()) {
        throw Error("trained model: class name count does not match the count tensor");
    }
    if (weights_.values.size() != counts_.cells().size()) {
        throw Error("trained model: weight tensor size does not match the count tensor");
    }
    for (double w : weights_.values) {
        if (!(w > 0.0) || !std::isfinite(w)) throw Error("trained model: weights must be positive");
    }
    rebuild_log_tables();
}

void TrainedModel::rebuild_log_tables() {
    const std::size_t k = counts_.class_count();
    const std::span<const std::uint32_t> cells = counts_.cells();
    log_lik_.resize(cells.size());
    log_joint_.resize(cells.size());
    for (std::size_t cell = 0; cell < counts_.layout().cell_count(); ++cell) {
        const std::size_t base = cell * k;
        std::uint64_t denom = 0;
        for (std::size_t c = 0; c < k; ++c) denom += cells[base + c];
        const double log_denom = std::log(static_cast<double>(denom));
        for (std::size_t c = 0; c < k; ++c) {
            log_lik_[base + c] = std::log(static_cast<double>(cells[base + c])) - log_denom;
            log_joint_[base + c] = log_lik_[base + c] + std::log(weights_.values[base + c]);
        }
    }
}

std::vector<double> TrainedModel::posterior_from_bins(std::span<const std::size_t> bins) const {
    const std::size_t k = counts_.class_count();
    const std::size_t f = counts_.schema().feature_count();
    const PairLayout& layout = counts_.layout();

    if (k == 1) return {1.0};

    std::vector<double> score(k, 0.0);
    for (std::size_t i = 0; i < f; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            if (i == j) continue;
            const double* row = log_joint_.data() + layout.cell(i, bins[i], j, bins[j]) * k;
            for (std::size_t c = 0; c < k; ++c) score[c] += row[c];
        }
    }
    const double peak = *std::max_element(score.begin(), score.end());
    double total = 0.0;
    for (double& s : score) {
        s = std::exp(s - peak);
        total += s;
    }
    for (double& s : score) s /= total;
    return score;
}

std::vector<double> TrainedModel::posterior(std::span<const double> features) const {
    return posterior_from_bins(counts_.schema().bin_all(features));
}

Prediction TrainedModel::predict(std::span<const double> features) const {
    Prediction p;
    p.posterior = posterior(features);
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.posterior.size(); ++c) {
        if (p.posterior[c] > p.posterior[best]) best = c;  // ties keep the lowest id
    }
    p.predicted = static_cast<int>(best);
    p.confidence = 100.0 * p.posterior[best];
    return p;
}

void TrainedModel::boost(std::span<const std::size_t> bins, int true_class, double dw) {
    const std::size_t k = counts_.class_count();
    const std::size_t f = counts_.schema().feature_count();
    const PairLayout& layout = counts_.layout();
    const std::size_t c = static_cast<std::size_t>(true_class);
    for (std::size_t i = 0; i < f; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            if (i == j) continue;
            const std::size_t idx = layout.cell(i, bins[i], j, bins[j]) * k + c;
            weights_.values[idx] += dw;
            log_joint_[idx] = log_lik_[idx] + std::log(weights_.values[idx]);
        }
    }
}

TrainedModel train(const Dataset& d, const BinningSchema& schema, double alpha, int iterations) {
    if (d.empty()) throw Error("train: dataset is empty");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("train: alpha must be in (0, 1]");
    if (iterations < 1) throw Error("train: iterations must be >= 1");

    CountModel counts = accumulate_counts(d, schema);
    const std::size_t k = counts.class_count();
    WeightModel weights;
    weights.values.assign(counts.cells().size(), 1.0 / static_cast<double>(k));
    weights.alpha = alpha;
    weights.iterations = iterations;

    TrainedModel model(std::move(counts), std::move(weights), d.schema().class_names);
    if (k < 2) return model;  // a single class is always predicted as-is

    // Bin every example once; bins are fixed for the whole training run.
    const std::size_t f = d.feature_count();
    std::vector<std::size_t> bins(d.size() * f);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::vector<std::size_t> b = schema.bin_all(d[i].features);
        std::copy(b.begin(), b.end(), bins.begin() + static_cast<std::ptrdiff_t>(i * f));
    }

    for (int pass = 0; pass < iterations; ++pass) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            const std::span<const std::size_t> example_bins(bins.data() + i * f, f);
            const std::vector<double> post = model.posterior_from_bins(example_bins);
            std::size_t predicted = 0;
            for (std::size_t c = 1; c < k; ++c) {
                if (post[c] > post[predicted]) predicted = c;
            }
            const std::size_t truth = static_cast<std::size_t>(d[i].label);
            if (predicted != truth) {
                const double dw = delta_w(post[truth], post[predicted], alpha);
                model.boost(example_bins, d[i].label, dw);
            }
        }
    }
    return model;
}

bool TrainedModel::operator==(const TrainedModel& other) const {
    return counts_ == other.counts_ && weights_ == other.weights_ && class_names_ == other.class_names_;
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    save(out);
    if (!out.good()) throw Error("failed writing '" + path + "'");
}

void TrainedModel::save(std::ostream& out) const {
    put_bytes(out, kMagic, 4);
    put_u32(out, kFormatVersion);

    const BinningSchema& schema = counts_.schema();
    put_u64(out, class_names_.size());
    put_u64(out, schema.feature_count());
    for (const std::string& name : class_names_) put_string(out, name);
    for (std::size_t i = 0; i < schema.feature_count(); ++i) {
        const FeatureBinning& fb = schema.feature(i);
        put_u64(out, fb.bin_count);
        put_f64(out, fb.lo);
        put_f64(out, fb.hi);
    }
    put_f64(out, weights_.alpha);
    put_u32(out, static_cast<std::uint32_t>(weights_.iterations));

    const std::span<const std::uint32_t> cells = counts_.cells();
    put_u64(out, cells.size());
    for (std::uint32_t c : cells) put_u32(out, c);
    for (double w : weights_.values) put_f64(out, w);
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return load(in, path);
}

TrainedModel TrainedModel::load(std::istream& in, const std::string& origin) {
    Reader r{in, origin};

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw Error(origin + ": not a model file (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw Error(origin + ": model format version " + std::to_string(version) +
                    " is not supported (this build reads version " + std::to_string(kFormatVersion) + ")");
    }

    const std::uint64_t k = r.u64();
    const std::uint64_t f = r.u64();
    if (k < 1 || k > (1u << 20)) throw Error(origin + ": implausible class count");
    if (f < 1 || f > (1u << 20)) throw Error(origin + ": implausible feature count");

    std::vector<std::string> class_names;
    class_names.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) class_names.push_back(r.string());

    std::vector<FeatureBinning> per_feature(f);
    for (std::uint64_t i = 0; i < f; ++i) {
        per_feature[i].bin_count = r.u64();
        per_feature[i].lo = r.f64();
        per_feature[i].hi = r.f64();
        if (per_feature[i].bin_count < 1) throw Error(origin + ": invalid bin count");
        if (!(per_feature[i].lo <= per_feature[i].hi)) throw Error(origin + ": invalid bin range");
    }
    BinningSchema schema(std::move(per_feature));

    WeightModel weights;
    weights.alpha = r.f64();
    weights.iterations = static_cast<int>(r.u32());
    if (!std::isfinite(weights.alpha)) throw Error(origin + ": invalid alpha");

    const std::uint64_t expected_cells = PairLayout(schema).cell_count() * k;
    const std::uint64_t cell_count = r.u64();
    if (cell_count != expected_cells) {
        throw Error(origin + ": cell count " + std::to_string(cell_count) +
                    " does not match the schema (expected " + std::to_string(expected_cells) + ")");
    }
    std::vector<std::uint32_t> raw(cell_count);
    for (std::uint64_t i = 0; i < cell_count; ++i) raw[i] = r.u32();
    CountModel counts(schema, k, std::move(raw));  // re-checks the Laplace invariant

    weights.values.resize(cell_count);
    for (std::uint64_t i = 0; i < cell_count; ++i) {
        weights.values[i] = r.f64();
        if (!(weights.values[i] > 0.0) || !std::isfinite(weights.values[i])) {
            throw Error(origin + ": invalid weight value");
        }
    }

    if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(origin + ": trailing bytes after the model payload");
    }
    return TrainedModel(std::move(counts), std::move(weights), std::move(class_names));
}

}  // namespace dbnn
