#pragma once

// Loss family over preference labels: cross-entropy on reward differences,
// a margin (hinge) variant, and the policy log-ratio form used for direct
// preference tuning. All three are affine in the label, which is what lets
// a label's distribution be swapped for its mean without changing expected
// loss; squared error is kept as the negative control that breaks this.

#include <vector>

#include "ordfb/core_types.hpp"

namespace ordfb {

// Numerically stable logistic function. Branches on the sign so exp never
// overflows for |x| up to ~700, and the result is clamped inside (0, 1):
// saturation returns the closest representable value, never exactly 0 or 1.
double sigmoid(double x);

struct PairScore {
    double r1 = 0.0;  // reward assigned to the first response
    double r2 = 0.0;  // reward assigned to the second response
};

struct DpoPairScore {
    double lp1_policy = 0.0;
    double lp1_ref = 0.0;
    double lp2_policy = 0.0;
    double lp2_ref = 0.0;
    double beta = 0.1;  // must be positive
};

// -z*log sigmoid(r1-r2) - (1-z)*log sigmoid(r2-r1), probabilities clamped to
// [1e-12, 1-1e-12] before the log. Label z must lie in [0,1].
double ce_loss(double z, PairScore s);

// z*max(0, C-(r1-r2)) + (1-z)*max(0, C-(r2-r1)) with margin C > 0.
double hinge_loss(double z, PairScore s, double margin = 2.0);

// Cross-entropy on the implied difference
//   beta * ((lp1_policy - lp1_ref) - (lp2_policy - lp2_ref)).
double dpo_loss(double z, DpoPairScore s);

// d(ce)/d(r1, r2) = (sigmoid(r1-r2) - z) * (+1, -1)
PairScore ce_loss_grad(double z, PairScore s);

// Subgradient; 0 at the hinge kinks.
PairScore hinge_loss_grad(double z, PairScore s, double margin = 2.0);

// Partial derivatives with respect to the two policy log-probs.
struct DpoGrad {
    double d_lp1_policy = 0.0;
    double d_lp2_policy = 0.0;
};
DpoGrad dpo_loss_grad(double z, DpoPairScore s);

// ---------------------------------------------------------------------------
// affinity in the label

enum class LossKind { Ce, Hinge, Dpo, Squared };

const char* loss_kind_name(LossKind kind);

// Evaluates the loss at label z and scalar probe t (a reward difference).
// Ce/hinge read t as r1 - r2; the policy form is probed with log-ratios
// whose implied difference equals t; squared is (z - sigmoid(t))^2.
double eval_loss_at_diff(LossKind kind, double z, double t,
                         double hinge_margin = 2.0, double dpo_beta = 0.1);

struct AffinityReport {
    double max_gap = 0.0;      // max over probes of |E_Z loss - loss at mean|
    double worst_probe = 0.0;
    bool affine = false;       // max_gap <= tol
};

// Compares the label-averaged loss against the loss at the label mean over a
// grid of probe differences.
AffinityReport verify_affinity(LossKind kind, const DiscreteMeasure& measure,
                               const std::vector<double>& probes,
                               double tol = 1e-12, double hinge_margin = 2.0,
                               double dpo_beta = 0.1);

// Default probe grid: 13 points spanning [-6, 6].
std::vector<double> default_probe_grid();

}  // namespace ordfb
