#include "ordfb/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordfb {

namespace {

constexpr double kLogClampEps = 1e-12;

void check_label(double z) {
    if (!(z >= 0.0 && z <= 1.0)) raise(Errc::LabelOutOfRange, "label outside [0,1]");
}

double clamped_log(double p) {
    return std::log(std::clamp(p, kLogClampEps, 1.0 - kLogClampEps));
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) raise(Errc::NonfiniteLoss, what);
}

}  // namespace

double sigmoid(double x) {
    double s;
    if (x >= 0.0) {
        double e = std::exp(-x);
        s = 1.0 / (1.0 + e);
    } else {
        double e = std::exp(x);
        s = e / (1.0 + e);
    }
    if (s >= 1.0) s = std::nextafter(1.0, 0.0);
    if (s <= 0.0) s = std::numeric_limits<double>::min();
    return s;
}

double ce_loss(double z, PairScore s) {
    check_label(z);
    check_finite(s.r1 - s.r2, "reward difference not finite");
    double d = s.r1 - s.r2;
    double loss = -z * clamped_log(sigmoid(d)) - (1.0 - z) * clamped_log(sigmoid(-d));
    check_finite(loss, "cross-entropy not finite");
    return loss;
}

double hinge_loss(double z, PairScore s, double margin) {
    check_label(z);
    if (!(margin > 0.0)) raise(Errc::OutOfRange, "margin must be positive");
    double d = s.r1 - s.r2;
    check_finite(d, "reward difference not finite");
    double loss = z * std::max(0.0, margin - d) + (1.0 - z) * std::max(0.0, margin + d);
    check_finite(loss, "hinge loss not finite");
    return loss;
}

double dpo_loss(double z, DpoPairScore s) {
    if (!(s.beta > 0.0)) raise(Errc::NonpositiveBeta, "beta must be positive");
    double d = s.beta * ((s.lp1_policy - s.lp1_ref) - (s.lp2_policy - s.lp2_ref));
    return ce_loss(z, {d, 0.0});
}

PairScore ce_loss_grad(double z, PairScore s) {
    check_label(z);
    double g = sigmoid(s.r1 - s.r2) - z;
    return {g, -g};
}

PairScore hinge_loss_grad(double z, PairScore s, double margin) {
    check_label(z);
    if (!(margin > 0.0)) raise(Errc::OutOfRange, "margin must be positive");
    double d = s.r1 - s.r2;
    double g = 0.0;
    if (margin - d > 0.0) g += z * (-1.0);
    if (margin + d > 0.0) g += (1.0 - z) * (+1.0);
    return {g, -g};
}

DpoGrad dpo_loss_grad(double z, DpoPairScore s) {
    if (!(s.beta > 0.0)) raise(Errc::NonpositiveBeta, "beta must be positive");
    double d = s.beta * ((s.lp1_policy - s.lp1_ref) - (s.lp2_policy - s.lp2_ref));
    double g = (sigmoid(d) - z) * s.beta;
    return {g, -g};
}

const char* loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::Ce: return "ce";
        case LossKind::Hinge: return "hinge";
        case LossKind::Dpo: return "dpo";
        case LossKind::Squared: return "squared";
    }
    return "unknown";
}

double eval_loss_at_diff(LossKind kind, double z, double t, double hinge_margin,
                         double dpo_beta) {
    switch (kind) {
        case LossKind::Ce:
            return ce_loss(z, {t, 0.0});
        case LossKind::Hinge:
            return hinge_loss(z, {t, 0.0}, hinge_margin);
        case LossKind::Dpo:
            return dpo_loss(z, {t / dpo_beta, 0.0, 0.0, 0.0, dpo_beta});
        case LossKind::Squared: {
            check_label(z);
            double d = z - sigmoid(t);
            return d * d;
        }
    }
    raise(Errc::OutOfRange, "unknown loss kind");
}

AffinityReport verify_affinity(LossKind kind, const DiscreteMeasure& measure,
                               const std::vector<double>& probes, double tol,
                               double hinge_margin, double dpo_beta) {
    AffinityReport rep;
    double mean = measure.mean();
    for (double t : probes) {
        double expected = 0.0;
        for (std::size_t i = 0; i < measure.scale().size(); ++i) {
            if (measure.mass(i) == 0.0) continue;
            expected += measure.mass(i) *
                        eval_loss_at_diff(kind, measure.scale().level(i), t,
                                          hinge_margin, dpo_beta);
        }
        double at_mean = eval_loss_at_diff(kind, mean, t, hinge_margin, dpo_beta);
        double gap = std::fabs(expected - at_mean);
        if (gap > rep.max_gap) {
            rep.max_gap = gap;
            rep.worst_probe = t;
        }
    }
    rep.affine = rep.max_gap <= tol;
    return rep;
}

std::vector<double> default_probe_grid() {
    std::vector<double> probes;
    for (int i = 0; i < 13; ++i) probes.push_back(-6.0 + i * 1.0);
    return probes;
}

}  // namespace ordfb
