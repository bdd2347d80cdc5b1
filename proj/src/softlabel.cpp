#include "ordfb/softlabel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ordfb/parallel.hpp"
#include "ordfb/rademacher.hpp"

namespace ordfb {

namespace {

constexpr double kLogClampEps = 1e-12;

void check_simplex(const SoftLabel& w) {
    if (w.empty()) raise(Errc::DimensionMismatch, "empty soft label");
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0)) raise(Errc::OutOfRange, "negative soft-label entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        raise(Errc::OutOfRange, "soft label does not sum to 1");
}

std::vector<double> apply_linear(const KHypothesis& w,
                                 const std::vector<double>& x) {
    std::vector<double> logits(w.size());
    for (std::size_t c = 0; c < w.size(); ++c) {
        if (w[c].size() != x.size())
            raise(Errc::DimensionMismatch, "hypothesis dim != feature dim");
        double acc = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) acc += w[c][d] * x[d];
        logits[c] = acc;
    }
    return logits;
}

}  // namespace

SoftLabel softmax(const std::vector<double>& logits) {
    if (logits.empty()) raise(Errc::DimensionMismatch, "empty logits");
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : logits) hi = std::max(hi, v);
    SoftLabel out(logits.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - hi);
        sum += out[j];
    }
    for (double& v : out) v = std::max(v / sum, std::numeric_limits<double>::min());
    return out;
}

double ce_loss_multiclass(const SoftLabel& label,
                          const std::vector<double>& logits) {
    check_simplex(label);
    if (label.size() != logits.size())
        raise(Errc::DimensionMismatch, "label and logits length differ");
    SoftLabel p = softmax(logits);
    double loss = 0.0;
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] == 0.0) continue;
        loss -= label[j] * std::log(std::clamp(p[j], kLogClampEps, 1.0));
    }
    if (!std::isfinite(loss)) raise(Errc::NonfiniteLoss, "multiclass ce not finite");
    return loss;
}

std::size_t class_from_uniform(const SoftLabel& probs, double u) {
    check_simplex(probs);
    double cum = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        cum += probs[j];
        if (u < cum) return j;
    }
    return probs.size() - 1;
}

SoftLabel one_hot(std::size_t k, std::size_t index) {
    if (index >= k) raise(Errc::OutOfRange, "class index out of range");
    SoftLabel out(k, 0.0);
    out[index] = 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// world

KClassWorld make_kclass_world(std::size_t k, std::size_t dim, RngSeed seed) {
    if (k < 2) raise(Errc::DimensionMismatch, "need at least 2 classes");
    if (dim == 0) raise(Errc::DimensionMismatch, "dimension must be >= 1");
    KClassWorld w;
    w.k = k;
    w.dim = dim;
    w.true_weights.assign(k, std::vector<double>(dim));
    Rng rng(seed);
    for (auto& row : w.true_weights)
        for (auto& v : row) v = rng.normal();
    return w;
}

SoftLabel kclass_oracle(const KClassWorld& world, const std::vector<double>& x) {
    return softmax(apply_linear(world.true_weights, x));
}

// ---------------------------------------------------------------------------
// teachers

namespace {

// full-batch multinomial logistic regression; returns the weight matrix
KHypothesis fit_logistic(const std::vector<std::vector<double>>& xs,
                         const std::vector<std::size_t>& labels, std::size_t k,
                         std::size_t steps, double lr) {
    const std::size_t n = xs.size();
    const std::size_t dim = xs[0].size();
    KHypothesis w(k, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> grad(k, std::vector<double>(dim));
    for (std::size_t s = 0; s < steps; ++s) {
        for (auto& row : grad) std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            SoftLabel p = softmax(apply_linear(w, xs[i]));
            for (std::size_t c = 0; c < k; ++c) {
                double delta = p[c] - (labels[i] == c ? 1.0 : 0.0);
                for (std::size_t d = 0; d < dim; ++d)
                    grad[c][d] += delta * xs[i][d];
            }
        }
        double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t d = 0; d < dim; ++d)
                w[c][d] -= lr * inv_n * grad[c][d];
    }
    return w;
}

}  // namespace

TeacherFn train_teacher_ensemble(const KClassWorld& world,
                                 const TeacherConfig& cfg, Rng& rng) {
    if (cfg.members == 0) raise(Errc::ConfigError, "teacher members");
    if (cfg.train_n == 0) raise(Errc::ConfigError, "teacher train_n");
    // shared feature rows
    Rng feat = rng.fork(1);
    std::vector<std::vector<double>> xs(cfg.train_n,
                                        std::vector<double>(world.dim));
    for (auto& x : xs)
        for (auto& v : x) v = feat.normal();
    std::vector<SoftLabel> oracle(cfg.train_n);
    for (std::size_t i = 0; i < cfg.train_n; ++i)
        oracle[i] = kclass_oracle(world, xs[i]);

    Rng labels_rng = rng.fork(2);
    std::vector<KHypothesis> members(cfg.members);
    for (std::size_t m = 0; m < cfg.members; ++m) {
        std::vector<std::size_t> labels(cfg.train_n);
        for (std::size_t i = 0; i < cfg.train_n; ++i)
            labels[i] = class_from_uniform(oracle[i], labels_rng.uniform());
        members[m] =
            fit_logistic(xs, labels, world.k, cfg.steps, cfg.learning_rate);
    }

    return [members, k = world.k](const std::vector<double>& x) {
        SoftLabel acc(k, 0.0);
        for (const auto& w : members) {
            SoftLabel p = softmax(apply_linear(w, x));
            for (std::size_t j = 0; j < k; ++j) acc[j] += p[j];
        }
        double inv = 1.0 / static_cast<double>(members.size());
        for (double& v : acc) v *= inv;
        return acc;
    };
}

TeacherBuilder ensemble_teacher_builder(TeacherConfig cfg) {
    return [cfg](const KClassWorld& world, Rng& rng) {
        return train_teacher_ensemble(world, cfg, rng);
    };
}

TeacherBuilder oracle_teacher_builder() {
    return [](const KClassWorld& world, Rng&) -> TeacherFn {
        return [world](const std::vector<double>& x) {
            return kclass_oracle(world, x);
        };
    };
}

// ---------------------------------------------------------------------------
// paradigms

const char* paradigm_name(Paradigm p) {
    switch (p) {
        case Paradigm::Oracle: return "oracle";
        case Paradigm::Original: return "original";
        case Paradigm::Distill: return "distill";
        case Paradigm::SampleTeacher: return "sample_teacher";
    }
    return "unknown";
}

std::vector<SoftLabel> paradigm_labels(Paradigm paradigm, const KClassWorld& world,
                                       const std::vector<std::vector<double>>& xs,
                                       const std::vector<double>& uniforms,
                                       const TeacherFn* teacher) {
    if ((paradigm == Paradigm::Distill || paradigm == Paradigm::SampleTeacher) &&
        teacher == nullptr)
        raise(Errc::MissingOracle, "paradigm needs a teacher");
    if (xs.size() != uniforms.size())
        raise(Errc::DimensionMismatch, "uniforms length != item count");
    std::vector<SoftLabel> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        switch (paradigm) {
            case Paradigm::Oracle:
                out[i] = kclass_oracle(world, xs[i]);
                break;
            case Paradigm::Original: {
                SoftLabel o = kclass_oracle(world, xs[i]);
                out[i] = one_hot(world.k, class_from_uniform(o, uniforms[i]));
                break;
            }
            case Paradigm::Distill:
                out[i] = (*teacher)(xs[i]);
                break;
            case Paradigm::SampleTeacher: {
                SoftLabel t = (*teacher)(xs[i]);
                out[i] = one_hot(world.k, class_from_uniform(t, uniforms[i]));
                break;
            }
        }
    }
    return out;
}

std::vector<CouplingSpec> soft_label_couplings(const SoftLabel& w) {
    check_simplex(w);
    std::vector<CouplingSpec> out;
    out.reserve(w.size());
    OrdinalScale binary = scale_preset(ScalePreset::Binary);
    for (double wj : w) {
        DiscreteMeasure coord(binary, {1.0 - wj, wj});  // Bernoulli(w_j)
        out.push_back(oracle_coupling(wj, coord));
    }
    return out;
}

// ---------------------------------------------------------------------------
// variance-reduction study

namespace {

LossMatrix kclass_loss_matrix(const std::vector<KHypothesis>& hypotheses,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<SoftLabel>& labels) {
    LossMatrix L(hypotheses.size(), std::vector<double>(xs.size()));
    for (std::size_t h = 0; h < hypotheses.size(); ++h)
        for (std::size_t i = 0; i < xs.size(); ++i)
            L[h][i] =
                ce_loss_multiclass(labels[i], apply_linear(hypotheses[h], xs[i]));
    return L;
}

std::size_t argmin_population_loss(const std::vector<KHypothesis>& hypotheses,
                                   const std::vector<std::vector<double>>& xs,
                                   const std::vector<SoftLabel>& labels) {
    std::size_t best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < hypotheses.size(); ++h) {
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc += ce_loss_multiclass(labels[i], apply_linear(hypotheses[h], xs[i]));
        if (acc < best_loss) {
            best_loss = acc;
            best = h;
        }
    }
    return best;
}

GapSummary gap_summary(const std::string& name, const std::vector<double>& a,
                       const std::vector<double>& b) {
    // paired differences a - b
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    MeanStd ms = mean_std(diff);
    GapSummary g;
    g.name = name;
    g.mean = ms.mean;
    g.stderr_mean = ms.stderr_mean;
    g.nonnegative_3s = ms.mean >= -3.0 * ms.stderr_mean;
    return g;
}

}  // namespace

VarianceReductionReport variance_reduction_report(
    const KClassWorld& world, const std::vector<KHypothesis>& hypotheses,
    const SoftLabelStudyConfig& cfg, RngSeed seed, const TeacherBuilder& builder) {
    if (hypotheses.empty()) raise(Errc::EmptyClass, "no hypotheses");
    if (cfg.n_replicas == 0) raise(Errc::EmptySample, "no replicas");

    const std::size_t R = cfg.n_replicas;
    Rng base(seed);

    // probe points are a property of the study, shared by all replicas
    Rng probe_rng = base.fork(777);
    std::vector<std::vector<double>> probes(cfg.probe_points,
                                            std::vector<double>(world.dim));
    for (auto& x : probes)
        for (auto& v : x) v = probe_rng.normal();

    constexpr std::size_t kParadigms = 4;
    const Paradigm order[kParadigms] = {Paradigm::Oracle, Paradigm::Distill,
                                        Paradigm::Original,
                                        Paradigm::SampleTeacher};

    std::vector<std::vector<double>> rad(kParadigms, std::vector<double>(R, 0.0));
    std::vector<std::vector<double>> class_bias(world.k,
                                                std::vector<double>(R, 0.0));
    std::vector<double> bias_term(R, 0.0);

    parallel_for(R, [&](std::size_t t) {
        Rng replica = base.fork(t);
        Rng feat = replica.fork(0);
        Rng ulab = replica.fork(1);
        Rng teacher_rng = replica.fork(2);
        Rng pop_rng = replica.fork(3);

        std::vector<std::vector<double>> xs(cfg.n_items,
                                            std::vector<double>(world.dim));
        for (auto& x : xs)
            for (auto& v : x) v = feat.normal();
        std::vector<double> uniforms(cfg.n_items);
        for (auto& u : uniforms) u = ulab.uniform();

        TeacherFn teacher = builder(world, teacher_rng);

        for (std::size_t p = 0; p < kParadigms; ++p) {
            auto labels =
                paradigm_labels(order[p], world, xs, uniforms, &teacher);
            rad[p][t] =
                rademacher_exact_serial(kclass_loss_matrix(hypotheses, xs, labels))
                    .value;
        }

        // probe-pooled teacher bias per class
        for (std::size_t c = 0; c < world.k; ++c) {
            double acc = 0.0;
            for (const auto& x : probes)
                acc += teacher(x)[c] - kclass_oracle(world, x)[c];
            class_bias[c][t] = acc / static_cast<double>(probes.size());
        }

        // population bias of the teacher-trained minimizer: argmin under
        // teacher labels vs argmin under oracle labels, both judged on a
        // fresh oracle-labeled stream (affinity lets oracle labels stand in
        // for expected one-hot draws)
        std::vector<std::vector<double>> pop_xs(cfg.bias_eval_n,
                                                std::vector<double>(world.dim));
        for (auto& x : pop_xs)
            for (auto& v : x) v = pop_rng.normal();
        std::vector<SoftLabel> teacher_labels(cfg.bias_eval_n),
            oracle_labels(cfg.bias_eval_n);
        for (std::size_t i = 0; i < cfg.bias_eval_n; ++i) {
            teacher_labels[i] = teacher(pop_xs[i]);
            oracle_labels[i] = kclass_oracle(world, pop_xs[i]);
        }
        std::size_t h_teacher =
            argmin_population_loss(hypotheses, pop_xs, teacher_labels);
        std::size_t h_oracle =
            argmin_population_loss(hypotheses, pop_xs, oracle_labels);
        std::vector<std::vector<double>> held(cfg.bias_eval_n,
                                              std::vector<double>(world.dim));
        for (auto& x : held)
            for (auto& v : x) v = pop_rng.normal();
        double lt = 0.0, lo = 0.0;
        for (const auto& x : held) {
            SoftLabel o = kclass_oracle(world, x);
            lt += ce_loss_multiclass(o, apply_linear(hypotheses[h_teacher], x));
            lo += ce_loss_multiclass(o, apply_linear(hypotheses[h_oracle], x));
        }
        bias_term[t] = (lt - lo) / static_cast<double>(cfg.bias_eval_n);
    });

    VarianceReductionReport rep;
    for (std::size_t p = 0; p < kParadigms; ++p) {
        MeanStd ms = mean_std(rad[p]);
        rep.rads.push_back({paradigm_name(order[p]), ms.mean, ms.stderr_mean});
    }
    rep.original_minus_distill =
        gap_summary("original_minus_distill", rad[2], rad[1]);
    rep.sample_teacher_minus_distill =
        gap_summary("sample_teacher_minus_distill", rad[3], rad[1]);
    rep.original_minus_oracle =
        gap_summary("original_minus_oracle", rad[2], rad[0]);

    double worst_z = 0.0;
    for (std::size_t c = 0; c < world.k; ++c) {
        MeanStd ms = mean_std(class_bias[c]);
        double z = ms.stderr_mean > 0.0
                       ? std::fabs(ms.mean) / ms.stderr_mean
                       : (ms.mean == 0.0 ? 0.0
                                         : std::numeric_limits<double>::infinity());
        if (z >= worst_z) {
            worst_z = z;
            rep.assumption2_bias = ms.mean;
            rep.assumption2_stderr = ms.stderr_mean;
        }
    }
    rep.assumption2_z = worst_z;
    rep.assumption2_pass = worst_z <= 3.0;

    MeanStd bt = mean_std(bias_term);
    rep.bias_term_mean = bt.mean;
    rep.bias_term_stderr = bt.stderr_mean;
    return rep;
}

SoftLabelInstance tiny_softlabel_instance() {
    SoftLabelInstance inst;
    inst.world.k = 2;
    inst.world.dim = 2;
    inst.world.true_weights = {{0.9, -0.5}, {-0.9, 0.5}};
    inst.hypotheses = {
        {{0.8, -0.3}, {-0.8, 0.3}},
        {{-0.2, 0.9}, {0.2, -0.9}},
        {{0.1, 0.1}, {-0.1, -0.1}},
    };
    return inst;
}

}  // namespace ordfb
