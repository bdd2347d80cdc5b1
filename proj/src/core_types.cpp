#include "ordfb/core_types.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ordfb {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonMonotone: return "NonMonotone";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::LabelMismatch: return "LabelMismatch";
        case Errc::IntervalViolation: return "IntervalViolation";
        case Errc::DegenerateInterval: return "DegenerateInterval";
        case Errc::OracleOutOfScale: return "OracleOutOfScale";
        case Errc::BiasedMeasure: return "BiasedMeasure";
        case Errc::EmptySample: return "EmptySample";
        case Errc::LabelOutOfRange: return "LabelOutOfRange";
        case Errc::NonpositiveBeta: return "NonpositiveBeta";
        case Errc::RowNotStochastic: return "RowNotStochastic";
        case Errc::BarycenterViolation: return "BarycenterViolation";
        case Errc::MarginalMismatch: return "MarginalMismatch";
        case Errc::InfeasibleExact: return "InfeasibleExact";
        case Errc::EmptyClass: return "EmptyClass";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NonfiniteLoss: return "NonfiniteLoss";
        case Errc::MalformedRecord: return "MalformedRecord";
        case Errc::MissingOracle: return "MissingOracle";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& detail) {
    throw Error(code, detail);
}

// ---------------------------------------------------------------------------
// rng

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Rng::Rng(RngSeed seed) : base_(seed.value), state_(splitmix64(seed.value)) {
    // avoid the all-zero fixed point of the mixer state
    if (state_ == 0) state_ = 0x6A09E667F3BCC909ull;
}

std::uint64_t Rng::next_u64() {
    // xorshift64* on a splitmix-initialized state: small, fast, and the
    // sequence is pinned down here rather than by library internals
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1Dull;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Box-Muller without the cached second value so every draw consumes
    // exactly two uniforms; keeps substream alignment easy to reason about
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

bool Rng::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) raise(Errc::OutOfRange, "bernoulli p outside [0,1]");
    return uniform() < p;
}

Rng Rng::fork(std::uint64_t stream) const {
    return Rng(RngSeed{splitmix64(base_ ^ (0x9E3779B97F4A7C15ull + stream * 0xD1B54A32D192ED03ull))});
}

// ---------------------------------------------------------------------------
// ordinal scales

OrdinalScale OrdinalScale::validated(std::vector<double> levels,
                                     std::vector<std::string> labels) {
    if (levels.size() < 2)
        raise(Errc::NonMonotone, "scale needs at least two levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] >= 0.0 && levels[i] <= 1.0)) {
            std::ostringstream os;
            os << "level " << levels[i] << " outside [0,1]";
            raise(Errc::OutOfRange, os.str());
        }
        if (i > 0 && !(levels[i] > levels[i - 1]))
            raise(Errc::NonMonotone, "levels must be strictly increasing");
    }
    if (!labels.empty() && labels.size() != levels.size())
        raise(Errc::LabelMismatch, "label count does not match level count");
    OrdinalScale s;
    s.levels_ = std::move(levels);
    s.labels_ = std::move(labels);
    return s;
}

OrdinalScale OrdinalScale::singleton(double value) {
    if (!(value >= 0.0 && value <= 1.0))
        raise(Errc::OutOfRange, "singleton level outside [0,1]");
    OrdinalScale s;
    s.levels_ = {value};
    return s;
}

std::optional<std::size_t> OrdinalScale::index_of(double value, double tol) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (std::fabs(levels_[i] - value) <= tol) return i;
    return std::nullopt;
}

OrdinalScale scale_preset(ScalePreset preset) {
    switch (preset) {
        case ScalePreset::Binary:
            return OrdinalScale::validated({0.0, 1.0}, {"worse", "better"});
        case ScalePreset::ThreeLevel:
            return OrdinalScale::validated({0.0, 0.5, 1.0},
                                           {"worse", "same-as", "better"});
        case ScalePreset::FiveLevel:
            return OrdinalScale::validated(
                {0.0, 0.2, 0.5, 0.8, 1.0},
                {"worse", "slightly-worse", "same", "slightly-better", "better"});
    }
    raise(Errc::OutOfRange, "unknown preset");
}

const char* scale_preset_name(ScalePreset preset) {
    switch (preset) {
        case ScalePreset::Binary: return "binary";
        case ScalePreset::ThreeLevel: return "three_level";
        case ScalePreset::FiveLevel: return "five_level";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// discrete measures

DiscreteMeasure::DiscreteMeasure(OrdinalScale scale, std::vector<double> mass)
    : scale_(std::move(scale)), mass_(std::move(mass)) {
    if (mass_.size() != scale_.size())
        raise(Errc::DimensionMismatch, "mass vector length != level count");
    double total = 0.0;
    for (double m : mass_) {
        if (!(m >= 0.0)) raise(Errc::OutOfRange, "negative mass");
        total += m;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        raise(Errc::OutOfRange, "mass does not sum to 1");
}

DiscreteMeasure DiscreteMeasure::dirac(OrdinalScale scale, std::size_t level_index) {
    if (level_index >= scale.size())
        raise(Errc::OutOfRange, "dirac level index out of range");
    std::vector<double> mass(scale.size(), 0.0);
    mass[level_index] = 1.0;
    return DiscreteMeasure(std::move(scale), std::move(mass));
}

double DiscreteMeasure::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i)
        acc += mass_[i] * scale_.level(i);
    return acc;
}

// ---------------------------------------------------------------------------
// preference items

void validate_item(const PreferenceItem& item, const OrdinalScale* scale,
                   double level_tol) {
    if (item.features1.empty() || item.features2.empty())
        raise(Errc::DimensionMismatch, "empty feature vector in item " + item.id);
    if (item.features1.size() != item.features2.size())
        raise(Errc::DimensionMismatch, "feature length mismatch in item " + item.id);
    if (item.oracle && !(*item.oracle >= 0.0 && *item.oracle <= 1.0))
        raise(Errc::OutOfRange, "oracle outside [0,1] in item " + item.id);
    if (item.label && scale && !scale->index_of(*item.label, level_tol))
        raise(Errc::LabelOutOfRange, "label is not a scale level in item " + item.id);
}

}  // namespace ordfb
