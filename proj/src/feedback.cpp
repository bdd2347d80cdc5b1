#include "ordfb/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ordfb {

DiscreteMeasure two_point_measure(const OrdinalScale& scale, double oracle,
                                  std::size_t j, std::size_t k) {
    if (j >= scale.size() || k >= scale.size())
        raise(Errc::OutOfRange, "level index out of range");
    if (j > k) std::swap(j, k);
    if (j == k) raise(Errc::DegenerateInterval, "two-point measure needs j != k");
    double zj = scale.level(j), zk = scale.level(k);
    if (!(zj <= oracle && oracle <= zk)) {
        std::ostringstream os;
        os << "oracle " << oracle << " outside [" << zj << ", " << zk << "]";
        raise(Errc::IntervalViolation, os.str());
    }
    std::vector<double> mass(scale.size(), 0.0);
    double width = zk - zj;
    mass[j] = (zk - oracle) / width;
    mass[k] = (oracle - zj) / width;
    return DiscreteMeasure(scale, std::move(mass));
}

DiscreteMeasure smallest_interval_measure(const OrdinalScale& scale, double oracle,
                                          double level_tol) {
    if (!(oracle >= 0.0 && oracle <= 1.0))
        raise(Errc::OutOfRange, "oracle outside [0,1]");
    if (auto idx = scale.index_of(oracle, level_tol))
        return DiscreteMeasure::dirac(scale, *idx);
    if (oracle < scale.level(0) || oracle > scale.level(scale.size() - 1))
        raise(Errc::OracleOutOfScale, "oracle outside the scale's level range");
    // adjacent bracket: z_j < oracle < z_{j+1}
    std::size_t j = 0;
    while (j + 1 < scale.size() && scale.level(j + 1) < oracle) ++j;
    return two_point_measure(scale, oracle, j, j + 1);
}

double label_from_uniform(const DiscreteMeasure& measure, double u) {
    double cum = 0.0;
    const auto& scale = measure.scale();
    for (std::size_t r = scale.size(); r-- > 0;) {
        cum += measure.mass(r);
        if (u < cum) return scale.level(r);
    }
    return scale.level(0);  // guards cumulative rounding short of 1
}

double sample_label(const DiscreteMeasure& measure, Rng& rng) {
    return label_from_uniform(measure, rng.uniform());
}

std::vector<LabelSystem> standard_label_systems() {
    return {
        {"oracle", std::nullopt},
        {"five_level", scale_preset(ScalePreset::FiveLevel)},
        {"three_level", scale_preset(ScalePreset::ThreeLevel)},
        {"binary", scale_preset(ScalePreset::Binary)},
    };
}

double sample_three_level_reference(double oracle, Rng& rng) {
    if (!(oracle >= 0.0 && oracle <= 1.0))
        raise(Errc::OutOfRange, "oracle outside [0,1]");
    if (oracle < 0.5) return rng.bernoulli(oracle / 0.5) ? 0.5 : 0.0;
    if (oracle > 0.5) return rng.bernoulli((oracle - 0.5) / 0.5) ? 1.0 : 0.5;
    return 0.5;
}

Decomposition decompose_unbiased(const DiscreteMeasure& measure, double mean_tol) {
    const OrdinalScale& scale = measure.scale();
    const double oracle = measure.mean();

    Decomposition out;
    out.oracle = oracle;

    std::vector<double> mass = measure.masses();
    double remaining = 1.0;  // weight not yet assigned to components
    const double mass_eps = 1e-15;

    // point mass sitting exactly on the oracle splits off unchanged
    if (auto oi = scale.index_of(oracle, mean_tol)) {
        double w = mass[*oi];
        if (w > mass_eps) {
            out.components.push_back({*oi, *oi, w});
            remaining -= w;
            mass[*oi] = 0.0;
            if (remaining <= mass_eps) return out;
            for (double& m : mass) m /= remaining > 0 ? remaining : 1.0;
            // mass now renormalized; component weights below get scaled back
            // by `remaining`
        }
    }

    for (std::size_t round = 0; round < scale.size(); ++round) {
        std::vector<std::size_t> lower, upper;
        for (std::size_t i = 0; i < scale.size(); ++i) {
            if (mass[i] <= mass_eps) continue;
            (scale.level(i) < oracle ? lower : upper).push_back(i);
        }
        if (lower.empty() && upper.empty()) break;
        if (lower.size() == 1 && upper.size() == 1) {
            // exactly the two-point measure on this pair
            out.components.push_back({lower[0], upper[0], remaining});
            remaining = 0.0;
            break;
        }
        if (lower.empty() || upper.empty())
            raise(Errc::BiasedMeasure,
                  "support on one side of the mean; measure cannot be unbiased");

        // support point with the least |z_i - oracle| * mass contribution;
        // ties break toward the lowest index
        std::size_t pick = scale.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < scale.size(); ++i) {
            if (mass[i] <= mass_eps) continue;
            double v = std::fabs(scale.level(i) - oracle) * mass[i];
            if (v < best) { best = v; pick = i; }
        }
        // nearest support point across the oracle from the pick
        bool pick_low = scale.level(pick) < oracle;
        const auto& other_side = pick_low ? upper : lower;
        std::size_t partner = other_side[0];
        double partner_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i : other_side) {
            double d = std::fabs(scale.level(i) - oracle);
            if (d < partner_dist) { partner_dist = d; partner = i; }
        }

        std::size_t j = pick_low ? pick : partner;
        std::size_t k = pick_low ? partner : pick;
        DiscreteMeasure pair = two_point_measure(scale, oracle, j, k);
        double alpha = mass[pick] / pair.mass(pick);  // <= 1 by the argmin choice
        alpha = std::min(alpha, 1.0);

        out.components.push_back({j, k, remaining * alpha});
        mass[pick] = 0.0;
        std::size_t other = (pick == j) ? k : j;
        mass[other] = std::max(0.0, mass[other] - alpha * pair.mass(other));
        double rest = 1.0 - alpha;
        if (rest <= mass_eps) { remaining = 0.0; break; }
        for (double& m : mass) m /= rest;
        remaining *= rest;
    }

    if (remaining > 1e-12)
        raise(Errc::BiasedMeasure, "decomposition did not exhaust the measure");
    return out;
}

DiscreteMeasure recompose(const OrdinalScale& scale, const Decomposition& d) {
    std::vector<double> mass(scale.size(), 0.0);
    double wsum = 0.0;
    for (const auto& c : d.components) {
        wsum += c.weight;
        if (c.j == c.k) {
            mass[c.j] += c.weight;
            continue;
        }
        DiscreteMeasure pair = two_point_measure(scale, d.oracle, c.j, c.k);
        for (std::size_t i = 0; i < scale.size(); ++i)
            mass[i] += c.weight * pair.mass(i);
    }
    if (std::fabs(wsum - 1.0) > 1e-9)
        raise(Errc::BiasedMeasure, "component weights do not sum to 1");
    // tidy tiny negative rounding before the measure validates
    for (double& m : mass) m = std::max(0.0, m);
    double total = 0.0;
    for (double m : mass) total += m;
    for (double& m : mass) m /= total;
    return DiscreteMeasure(scale, std::move(mass));
}

UnbiasednessReport check_unbiasedness(const std::vector<double>& labels,
                                      double oracle, double z_threshold,
                                      double exact_tol) {
    if (labels.empty()) raise(Errc::EmptySample, "no labels to check");
    UnbiasednessReport rep;
    rep.oracle = oracle;
    double acc = 0.0;
    for (double v : labels) acc += v;
    rep.sample_mean = acc / static_cast<double>(labels.size());
    if (labels.size() >= 2) {
        double ss = 0.0;
        for (double v : labels) {
            double d = v - rep.sample_mean;
            ss += d * d;
        }
        double var = ss / static_cast<double>(labels.size() - 1);
        rep.stderr_mean = std::sqrt(var / static_cast<double>(labels.size()));
    }
    double gap = std::fabs(rep.sample_mean - oracle);
    if (rep.stderr_mean == 0.0) {
        rep.zscore = gap <= exact_tol ? 0.0 : std::numeric_limits<double>::infinity();
        rep.pass = gap <= exact_tol;
    } else {
        rep.zscore = gap / rep.stderr_mean;
        rep.pass = rep.zscore <= z_threshold;
    }
    return rep;
}

}  // namespace ordfb
