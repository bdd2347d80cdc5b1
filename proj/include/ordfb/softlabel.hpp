#pragma once

// Soft labeling for k-class problems: four labeling paradigms (oracle
// probabilities, one-hot samples, a distilled teacher's probabilities,
// samples from the teacher), the teacher-ensemble construction, and the
// complexity comparison showing that training on a (marginally unbiased)
// teacher's soft labels cannot be harder than training on one-hot samples.

#include <functional>
#include <string>
#include <vector>

#include "ordfb/core_types.hpp"
#include "ordfb/coupling.hpp"

namespace ordfb {

using SoftLabel = std::vector<double>;  // point of the k-simplex

// softmax with max-shift; never returns an exact zero
SoftLabel softmax(const std::vector<double>& logits);

// -sum_j label_j * log softmax_j(logits), log probabilities clamped at 1e-12
double ce_loss_multiclass(const SoftLabel& label, const std::vector<double>& logits);

// ascending CDF walk over class indices
std::size_t class_from_uniform(const SoftLabel& probs, double u);
SoftLabel one_hot(std::size_t k, std::size_t index);

// ---------------------------------------------------------------------------
// synthetic k-class world

struct KClassWorld {
    std::size_t k = 3;
    std::size_t dim = 2;
    std::vector<std::vector<double>> true_weights;  // k x dim
};

KClassWorld make_kclass_world(std::size_t k, std::size_t dim, RngSeed seed);

// oracle class probabilities: softmax(W x)
SoftLabel kclass_oracle(const KClassWorld& world, const std::vector<double>& x);

// ---------------------------------------------------------------------------
// teachers

using TeacherFn = std::function<SoftLabel(const std::vector<double>&)>;

struct TeacherConfig {
    std::size_t members = 32;
    std::size_t train_n = 512;   // feature rows shared by every member
    std::size_t steps = 400;     // full-batch GD steps per member
    double learning_rate = 1.5;
};

// Average of `members` multinomial logistic classifiers, each fit to an
// independently resampled one-hot labeling of the same feature rows. The
// randomness of the returned teacher is exactly the randomness of those
// label draws.
TeacherFn train_teacher_ensemble(const KClassWorld& world,
                                 const TeacherConfig& cfg, Rng& rng);

// Builds a teacher from a replica's rng stream.
using TeacherBuilder = std::function<TeacherFn(const KClassWorld&, Rng&)>;

TeacherBuilder ensemble_teacher_builder(TeacherConfig cfg);
// degenerate teacher that returns the oracle probabilities
TeacherBuilder oracle_teacher_builder();

// ---------------------------------------------------------------------------
// paradigms

enum class Paradigm { Oracle, Original, Distill, SampleTeacher };
const char* paradigm_name(Paradigm p);

// Labels one replica of features under a paradigm. `uniforms` supplies one
// draw per item; Original and SampleTeacher share them (common random
// numbers), Oracle and Distill ignore them.
std::vector<SoftLabel> paradigm_labels(Paradigm paradigm, const KClassWorld& world,
                                       const std::vector<std::vector<double>>& xs,
                                       const std::vector<double>& uniforms,
                                       const TeacherFn* teacher);

// Per-class two-point couplings witnessing that one-hot sampling from a
// simplex point w is a conditional-mean coarsening: coordinate j couples the
// constant w_j to a Bernoulli(w_j) on {0, 1}. Each spec validates under the
// coupling checker.
std::vector<CouplingSpec> soft_label_couplings(const SoftLabel& w);

// ---------------------------------------------------------------------------
// variance-reduction study

// k-class linear hypotheses: logits = W x
using KHypothesis = std::vector<std::vector<double>>;  // k x dim

struct SoftLabelStudyConfig {
    std::size_t n_items = 4;      // items per complexity replica
    std::size_t n_replicas = 256;
    TeacherConfig teacher;
    std::size_t probe_points = 24;   // where teacher bias is measured
    std::size_t bias_eval_n = 256;   // population proxy for the bias term
};

struct RadSummary {
    std::string name;
    double value = 0.0;
    double stderr_value = 0.0;
};

struct GapSummary {
    std::string name;
    double mean = 0.0;        // paired per-replica differences
    double stderr_mean = 0.0;
    bool nonnegative_3s = false;  // mean >= -3 stderr
};

struct VarianceReductionReport {
    std::vector<RadSummary> rads;  // oracle, distill, original, sample_teacher
    GapSummary original_minus_distill;       // predicted >= 0
    GapSummary sample_teacher_minus_distill; // predicted >= 0
    GapSummary original_minus_oracle;        // predicted >= 0
    // marginal-unbiasedness check: probe-pooled per-class teacher bias,
    // worst class z-score over replicas
    double assumption2_bias = 0.0;    // worst-class pooled bias
    double assumption2_stderr = 0.0;
    double assumption2_z = 0.0;
    bool assumption2_pass = false;    // |z| <= 3
    // excess population loss of the teacher-trained minimizer (>= 0 in theory)
    double bias_term_mean = 0.0;
    double bias_term_stderr = 0.0;
};

// Exact sign enumeration per replica; every paradigm within a replica sees
// the same features, the same label uniforms, and the same teacher.
VarianceReductionReport variance_reduction_report(
    const KClassWorld& world, const std::vector<KHypothesis>& hypotheses,
    const SoftLabelStudyConfig& cfg, RngSeed seed,
    const TeacherBuilder& builder);

// instance used by the verification suite: k=2, dim=2, 3 hypotheses
struct SoftLabelInstance {
    KClassWorld world;
    std::vector<KHypothesis> hypotheses;
};
SoftLabelInstance tiny_softlabel_instance();

}  // namespace ordfb
