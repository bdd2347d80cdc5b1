#pragma once

// Desk-scale reward learning on a synthetic preference world: a hidden
// linear scorer defines oracle preference probabilities through a logistic
// link; datasets are labeled on an ordinal scale; a linear reward model is
// fit by gradient descent and evaluated against oracle labels in and out
// of distribution.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ordfb/core_types.hpp"
#include "ordfb/feedback.hpp"
#include "ordfb/losses.hpp"

namespace ordfb {

struct SyntheticWorld {
    std::size_t dim = 16;
    std::vector<double> true_weights;   // hidden scorer
    double temperature = 20.0 / 3.0;    // oracle = sigmoid(score diff / temperature)
    double ood_shift = 0.5;             // out-of-distribution: features*scale + shift
    double ood_scale = 1.5;
};

// true_weights ~ standard normal, drawn once from the world seed
SyntheticWorld make_world(std::size_t dim, RngSeed seed);

double oracle_probability(const SyntheticWorld& world,
                          const std::vector<double>& f1,
                          const std::vector<double>& f2);

// n items; features standard normal (shifted/scaled when ood); oracle filled;
// label filled per the system using one uniform per item, so datasets built
// from the same rng state share features and label draws across scales.
std::vector<PreferenceItem> generate_dataset(const SyntheticWorld& world,
                                             std::size_t n,
                                             const LabelSystem& system, Rng& rng,
                                             bool ood = false);

struct TrainConfig {
    LossKind loss = LossKind::Ce;  // Ce or Hinge
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    std::size_t batch_size = 0;    // 0: full batch
    double l2 = 0.0;               // ridge penalty (l2/2)*|w|^2
    double momentum = 0.0;
    double hinge_margin = 2.0;
    std::size_t eval_every = 10;   // eval cadence in epochs (final always kept)
    RngSeed seed;                  // minibatch shuffling
};

struct EvalPoint {
    std::size_t epoch = 0;
    double train_objective = 0.0;
    double oracle_ce = 0.0;  // cross-entropy against oracle labels, eval set
    double id_accuracy = 0.0;
    double ood_accuracy = 0.0;
};

struct RunReport {
    std::vector<double> weights;
    std::vector<EvalPoint> curve;
    double final_weight_norm = 0.0;
};

struct EvalSets {
    std::vector<PreferenceItem> id_items;   // oracle required
    std::vector<PreferenceItem> ood_items;  // oracle required
};

// Mean loss over labeled items plus (l2/2)*|w|^2, and its gradient.
// The mean is a fixed-block sum, so it is reproducible under threading.
double batch_objective(const std::vector<PreferenceItem>& items,
                       const std::vector<double>& weights, const TrainConfig& cfg);
std::vector<double> batch_gradient(const std::vector<PreferenceItem>& items,
                                   const std::vector<double>& weights,
                                   const TrainConfig& cfg);

// Gradient descent from zero weights. Throws NonfiniteLoss on divergence.
RunReport train(const std::vector<PreferenceItem>& data, const TrainConfig& cfg,
                const EvalSets& eval);

// Fraction of eval items where sign<w, f1-f2> matches sign(oracle - 0.5);
// items with oracle exactly 0.5 are excluded from the denominator.
double sign_accuracy(const std::vector<PreferenceItem>& items,
                     const std::vector<double>& weights);

// ---------------------------------------------------------------------------
// sweeps

struct SweepCell {
    std::string key;            // system name or tied ratio
    std::uint64_t seed = 0;
    double final_oracle_ce = 0.0;
    double final_id_accuracy = 0.0;
    double final_ood_accuracy = 0.0;
    double final_weight_norm = 0.0;
    std::vector<EvalPoint> curve;
};

struct SweepSummaryRow {
    std::string key;
    double oracle_ce_mean = 0.0, oracle_ce_std = 0.0;
    double id_accuracy_mean = 0.0, id_accuracy_std = 0.0;
    double ood_accuracy_mean = 0.0, ood_accuracy_std = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;         // all (key, seed) runs
    std::vector<SweepSummaryRow> summary; // one row per key, seed-aggregated
};

// One training run per (system, seed). Within a seed all systems share
// features, label uniforms, and eval sets (common random numbers).
SweepResult granularity_sweep(const SyntheticWorld& world, std::size_t n_train,
                              std::size_t n_eval,
                              const std::vector<LabelSystem>& systems,
                              const std::vector<std::uint64_t>& seeds,
                              const TrainConfig& cfg);

// Three-level datasets mixing tied items (label 0.5) and untied items at a
// fixed ratio: candidate items are drawn and labeled on the three-level
// scale, then routed to the tied/untied bucket until both quotas are met.
SweepResult tied_ratio_sweep(const SyntheticWorld& world, std::size_t n_train,
                             std::size_t n_eval, const std::vector<double>& ratios,
                             const std::vector<std::uint64_t>& seeds,
                             const TrainConfig& cfg);

}  // namespace ordfb
