#pragma once

// Empirical Rademacher complexity of a hypothesis class composed with a
// label-dependent loss, and its expectation over resampled datasets. The
// point of the module: feedback systems whose labels are conditional-mean
// coarsenings of finer ones can only raise this complexity, so estimates
// across scales should come out ordered.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ordfb/core_types.hpp"
#include "ordfb/feedback.hpp"
#include "ordfb/losses.hpp"

namespace ordfb {

// Hypotheses are linear scorers: h_w(item) = <w, features1 - features2>.
// Either an explicit finite set or a norm ball materialized as a grid of
// directions (optionally enriched by local ascent; still a finite subset,
// so ball suprema are lower bounds and ball results are indicative only).
struct LinearBall {
    std::size_t dim = 0;
    double norm_bound = 1.0;
    std::size_t grid_points = 64;
};

class HypothesisClass {
public:
    static HypothesisClass finite(std::vector<std::vector<double>> weights);
    static HypothesisClass linear_ball(LinearBall ball);

    bool is_ball() const { return is_ball_; }
    const LinearBall& ball() const { return ball_; }
    // For a ball this is the deterministic direction grid.
    const std::vector<std::vector<double>>& candidates() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

private:
    bool is_ball_ = false;
    LinearBall ball_;
    std::vector<std::vector<double>> weights_;
};

struct RadMode {
    bool exact = true;          // enumerate all sign vectors (requires n <= 20)
    std::size_t n_draws = 4096; // Monte Carlo sign draws when exact is false
};

struct RadEstimate {
    double value = 0.0;
    double stderr_value = 0.0;  // 0 in exact mode
};

// Loss matrix L[h][i] = loss(label_i, score of hypothesis h on item i).
using LossMatrix = std::vector<std::vector<double>>;

// Exact average over all sign vectors, enumerated in complement pairs so a
// singleton class yields exactly zero and every value is nonnegative.
// Kernels: `parallel` shards the sign space, `serial` is the reference with
// identical blocking (bit-identical results).
RadEstimate rademacher_exact(const LossMatrix& losses);
RadEstimate rademacher_exact_serial(const LossMatrix& losses);

// Monte Carlo over the given sign draws (each entry +1/-1 per item).
RadEstimate rademacher_mc(const LossMatrix& losses,
                          const std::vector<std::vector<signed char>>& signs);

std::vector<std::vector<signed char>> draw_sign_vectors(std::size_t n_draws,
                                                        std::size_t n_items,
                                                        Rng& rng);

// Empirical complexity of labeled items (every item needs a label).
// Exact mode refuses n > 20 or a ball class without materialized candidates.
RadEstimate empirical_rademacher(const std::vector<PreferenceItem>& items,
                                 const HypothesisClass& hypotheses,
                                 LossKind loss, RadMode mode, RngSeed seed,
                                 double hinge_margin = 2.0, double dpo_beta = 0.1);

// ---------------------------------------------------------------------------
// expectation over datasets, with common random numbers across systems

// Draws the items of one dataset replica (features + oracle, no labels).
using ReplicaSampler = std::function<std::vector<PreferenceItem>(Rng&)>;

struct SystemRad {
    std::string name;
    RadEstimate est;  // mean over replicas; stderr from replica spread
};

struct PairedGap {
    std::size_t fine_index = 0;
    std::size_t coarse_index = 0;
    double gap_mean = 0.0;    // coarse value - fine value, paired per replica
    double gap_stderr = 0.0;
    int flag = 0;             // +1 above 3 stderr, -1 below, 0 inconclusive
};

struct OrderingReport {
    std::vector<SystemRad> systems;
    std::vector<PairedGap> pairs;                 // all (fine, coarse) index pairs
    std::vector<std::vector<double>> per_replica; // [system][replica]
};

// For each replica: one feature stream, one uniform stream shared by every
// system (common random numbers), one sign stream for Monte Carlo mode.
// Systems should be listed fine to coarse; pairs cover every (a, b), a < b.
OrderingReport expected_rademacher_ordering(const ReplicaSampler& sampler,
                                            const std::vector<LabelSystem>& systems,
                                            const HypothesisClass& hypotheses,
                                            LossKind loss, std::size_t n_replicas,
                                            RadMode mode, RngSeed seed,
                                            double z_flag = 3.0);

// ---------------------------------------------------------------------------
// builtin tiny instance: 4 items, 8 fixed linear hypotheses, 3 features,
// oracle = sigmoid of the true-score difference. Small enough for exact
// sign enumeration, sharp enough to separate binary from oracle labels.

struct TinyInstance {
    ReplicaSampler sampler;
    HypothesisClass hypotheses;
    std::vector<LabelSystem> systems;  // oracle, five_level, three_level, binary
};

TinyInstance tiny_ordering_instance();

}  // namespace ordfb
