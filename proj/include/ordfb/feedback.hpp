#pragma once

// Synthesis of ordinal feedback labels that are unbiased for a given oracle
// preference probability: two-point interpolation measures, the
// smallest-interval sampler, decomposition of arbitrary unbiased measures
// into two-point components, and an empirical unbiasedness check.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ordfb/core_types.hpp"

namespace ordfb {

// Measure supported on levels {z_j, z_k} with mean equal to `oracle`:
//   mass(z_j) = (z_k - oracle) / (z_k - z_j)
//   mass(z_k) = (oracle - z_j) / (z_k - z_j)
// Requires z_j <= oracle <= z_k and j != k.
DiscreteMeasure two_point_measure(const OrdinalScale& scale, double oracle,
                                  std::size_t j, std::size_t k);

// Unbiased measure on the two adjacent levels bracketing the oracle, or a
// point mass when the oracle equals a level (within level_tol).
DiscreteMeasure smallest_interval_measure(const OrdinalScale& scale, double oracle,
                                          double level_tol = 1e-9);

// Maps one uniform draw u in [0,1) to a level. Scans levels from the top
// down and returns the first level whose cumulative mass exceeds u, so a
// two-point measure consumes its uniform exactly like bernoulli(mass of
// upper level). Sharing u across scales yields common-random-number labels.
double label_from_uniform(const DiscreteMeasure& measure, double u);

// One label draw: label_from_uniform(measure, rng.uniform()).
double sample_label(const DiscreteMeasure& measure, Rng& rng);

// A named labeling system: draw labels from the smallest-interval measure on
// a scale, or (scale empty) pass the oracle value through as the label.
struct LabelSystem {
    std::string name;
    std::optional<OrdinalScale> scale;
};

// Systems used throughout: oracle, five_level, three_level, binary.
std::vector<LabelSystem> standard_label_systems();

// Literal transcription of the three-level sampling rule: oracle below 0.5
// draws Bernoulli(oracle/0.5) for a 0.5-vs-0 label, above 0.5 draws
// Bernoulli((oracle-0.5)/0.5) for a 1-vs-0.5 label, exactly 0.5 returns 0.5.
// Kept as an independent reference for the generalized sampler.
double sample_three_level_reference(double oracle, Rng& rng);

struct TwoPointComponent {
    std::size_t j = 0;  // lower level index (j == k encodes a point mass)
    std::size_t k = 0;  // upper level index
    double weight = 0.0;
};

struct Decomposition {
    double oracle = 0.0;
    std::vector<TwoPointComponent> components;
};

// Writes an unbiased measure as a convex combination of two-point measures
// sharing its mean. Greedy peeling: take the support point minimizing
// |z_i - oracle| * mass(z_i), pair it with the nearest support point on the
// other side of the oracle, subtract the largest feasible multiple of that
// two-point measure, renormalize, repeat. Point mass at the oracle level
// (if the oracle is itself a level) splits off first as a j == k component.
Decomposition decompose_unbiased(const DiscreteMeasure& measure,
                                 double mean_tol = 1e-9);

// Mixture the decomposition describes, as a measure on the same scale.
DiscreteMeasure recompose(const OrdinalScale& scale, const Decomposition& d);

struct UnbiasednessReport {
    double sample_mean = 0.0;
    double stderr_mean = 0.0;  // sample std / sqrt(n), 0 when n < 2
    double oracle = 0.0;
    double zscore = 0.0;
    bool pass = false;  // |sample_mean - oracle| <= z_threshold * stderr
};

// Empirical mean test against the oracle at the given z threshold. Exact
// degenerate samples (stderr 0) pass iff the mean matches the oracle to
// within exact_tol.
UnbiasednessReport check_unbiasedness(const std::vector<double>& labels,
                                      double oracle, double z_threshold = 3.0,
                                      double exact_tol = 1e-12);

}  // namespace ordfb
