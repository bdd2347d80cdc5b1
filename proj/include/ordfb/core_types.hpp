#pragma once

// Core vocabulary for the ordinal-feedback lab: error codes, the deterministic
// RNG used by every stochastic routine, ordinal scales, discrete measures over
// a scale, and the preference-pair record that datasets are made of.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordfb {

// ---------------------------------------------------------------------------
// errors

enum class Errc {
    NonMonotone,
    OutOfRange,
    LabelMismatch,
    IntervalViolation,
    DegenerateInterval,
    OracleOutOfScale,
    BiasedMeasure,
    EmptySample,
    LabelOutOfRange,
    NonpositiveBeta,
    RowNotStochastic,
    BarycenterViolation,
    MarginalMismatch,
    InfeasibleExact,
    EmptyClass,
    DimensionMismatch,
    NonfiniteLoss,
    MalformedRecord,
    MissingOracle,
    ConfigError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& detail);

// ---------------------------------------------------------------------------
// deterministic rng
//
// All sampling in the library goes through Rng so that a run is a pure
// function of its seed. Substreams are derived with a splitmix64 hash of
// (base seed, stream id); parallel loops give each shard its own substream
// and reduce in a fixed order, which keeps results independent of the
// thread count.

struct RngSeed {
    std::uint64_t value = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
public:
    explicit Rng(RngSeed seed);

    // uniform on [0, 1), 53-bit mantissa
    double uniform();
    // standard normal via Box-Muller, two uniforms per draw (no cached spare)
    double normal();
    // success iff uniform() < p; the library-wide Bernoulli convention
    bool bernoulli(double p);
    std::uint64_t next_u64();

    // independent substream; fork(i) != fork(j) for i != j
    Rng fork(std::uint64_t stream) const;

    std::uint64_t base_seed() const { return base_; }

private:
    std::uint64_t base_;
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// ordinal scales

// Strictly increasing feedback levels z_1 < ... < z_m inside [0, 1].
// Two or more levels are required except for the degenerate one-point scale
// used to express "the feedback is the oracle value itself".
class OrdinalScale {
public:
    static OrdinalScale validated(std::vector<double> levels,
                                  std::vector<std::string> labels = {});
    // one-point scale {value}; only way to construct m == 1
    static OrdinalScale singleton(double value);

    std::size_t size() const { return levels_.size(); }
    double level(std::size_t i) const { return levels_[i]; }
    const std::vector<double>& levels() const { return levels_; }
    const std::vector<std::string>& labels() const { return labels_; }

    // index of the level equal to value within tol, if any
    std::optional<std::size_t> index_of(double value, double tol = 1e-9) const;

    bool operator==(const OrdinalScale& other) const {
        return levels_ == other.levels_;
    }

private:
    OrdinalScale() = default;
    std::vector<double> levels_;
    std::vector<std::string> labels_;
};

enum class ScalePreset { Binary, ThreeLevel, FiveLevel };

// Binary {0,1}, three-level {0,0.5,1}, five-level {0,0.2,0.5,0.8,1}.
// Label words run from "worse" at level 0 to "better" at level 1: a level is
// the population fraction preferring the first response, so 1 means the
// first response wins.
OrdinalScale scale_preset(ScalePreset preset);

const char* scale_preset_name(ScalePreset preset);

// ---------------------------------------------------------------------------
// discrete measures

// Probability measure over the levels of a scale. Mass vector is aligned
// with scale.levels(); must be nonnegative and sum to 1 within 1e-12.
class DiscreteMeasure {
public:
    DiscreteMeasure(OrdinalScale scale, std::vector<double> mass);
    static DiscreteMeasure dirac(OrdinalScale scale, std::size_t level_index);

    const OrdinalScale& scale() const { return scale_; }
    double mass(std::size_t i) const { return mass_[i]; }
    const std::vector<double>& masses() const { return mass_; }

    // sum_i mass_i * z_i, accumulated in level order
    double mean() const;

private:
    OrdinalScale scale_;
    std::vector<double> mass_;
};

// ---------------------------------------------------------------------------
// preference items

// One comparison: two feature vectors, an optional oracle preference
// probability for the first response, and an optional observed label that
// must sit on whatever scale the dataset was labeled with.
struct PreferenceItem {
    std::string id;
    std::vector<double> features1;
    std::vector<double> features2;
    std::optional<double> oracle;  // in [0, 1]
    std::optional<double> label;   // a level of the labeling scale
};

// Throws on empty/mismatched features, oracle outside [0,1], or a label that
// is not a level of `scale` (when a scale is given).
void validate_item(const PreferenceItem& item,
                   const OrdinalScale* scale = nullptr,
                   double level_tol = 1e-9);

}  // namespace ordfb
