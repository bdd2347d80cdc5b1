#include "ordfb/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ordfb/feedback.hpp"
#include "ordfb/parallel.hpp"

namespace ordfb {

namespace {

constexpr std::size_t kMaxExactItems = 20;
constexpr std::size_t kMaskBlock = 4096;

// contribution of one complement pair of sign vectors: (max_h A_h) - (min_h A_h)
double pair_contribution(const LossMatrix& L, std::size_t n, std::uint64_t mask) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& row : L) {
        double a = row[n - 1];  // last item's sign fixed to +1
        for (std::size_t i = 0; i + 1 < n; ++i)
            a += ((mask >> i) & 1u) ? -row[i] : row[i];
        hi = std::max(hi, a);
        lo = std::min(lo, a);
    }
    return hi - lo;
}

RadEstimate exact_impl(const LossMatrix& L, bool parallel) {
    if (L.empty()) raise(Errc::EmptyClass, "no hypotheses");
    const std::size_t n = L[0].size();
    if (n == 0) raise(Errc::EmptySample, "no items");
    if (n > kMaxExactItems)
        raise(Errc::InfeasibleExact, "exact enumeration limited to 20 items");
    const std::uint64_t pairs = 1ull << (n - 1);

    auto f = [&](std::size_t mask) { return pair_contribution(L, n, mask); };
    double total = parallel ? block_sum_parallel(pairs, f) : block_sum_serial(pairs, f);
    RadEstimate est;
    est.value = total / static_cast<double>(1ull << n) / static_cast<double>(n);
    return est;
}

std::vector<double> make_scores(const std::vector<PreferenceItem>& items,
                                const std::vector<double>& w) {
    std::vector<double> out(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        if (w.size() != it.features1.size())
            raise(Errc::DimensionMismatch, "hypothesis dim != feature dim");
        double acc = 0.0;
        for (std::size_t d = 0; d < w.size(); ++d)
            acc += w[d] * (it.features1[d] - it.features2[d]);
        out[i] = acc;
    }
    return out;
}

LossMatrix make_loss_matrix(const std::vector<PreferenceItem>& items,
                            const std::vector<std::vector<double>>& weights,
                            LossKind loss, double hinge_margin, double dpo_beta) {
    LossMatrix L(weights.size(), std::vector<double>(items.size()));
    for (std::size_t h = 0; h < weights.size(); ++h) {
        std::vector<double> scores = make_scores(items, weights[h]);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!items[i].label)
                raise(Errc::MissingOracle, "item lacks a label: " + items[i].id);
            L[h][i] = eval_loss_at_diff(loss, *items[i].label, scores[i],
                                        hinge_margin, dpo_beta);
        }
    }
    return L;
}

}  // namespace

RadEstimate rademacher_exact(const LossMatrix& losses) {
    return exact_impl(losses, /*parallel=*/true);
}

RadEstimate rademacher_exact_serial(const LossMatrix& losses) {
    return exact_impl(losses, /*parallel=*/false);
}

RadEstimate rademacher_mc(const LossMatrix& losses,
                          const std::vector<std::vector<signed char>>& signs) {
    if (losses.empty()) raise(Errc::EmptyClass, "no hypotheses");
    const std::size_t n = losses[0].size();
    if (n == 0) raise(Errc::EmptySample, "no items");
    if (signs.empty()) raise(Errc::EmptySample, "no sign draws");

    std::vector<double> per_draw(signs.size());
    for (std::size_t t = 0; t < signs.size(); ++t) {
        const auto& eps = signs[t];
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : losses) {
            double a = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                a += eps[i] > 0 ? row[i] : -row[i];
            best = std::max(best, a);
        }
        per_draw[t] = best / static_cast<double>(n);
    }
    MeanStd ms = mean_std(per_draw);
    return {ms.mean, ms.stderr_mean};
}

std::vector<std::vector<signed char>> draw_sign_vectors(std::size_t n_draws,
                                                        std::size_t n_items,
                                                        Rng& rng) {
    std::vector<std::vector<signed char>> out(n_draws,
                                              std::vector<signed char>(n_items));
    for (auto& eps : out)
        for (auto& s : eps) s = rng.bernoulli(0.5) ? 1 : -1;
    return out;
}

// ---------------------------------------------------------------------------
// hypothesis classes

HypothesisClass HypothesisClass::finite(std::vector<std::vector<double>> weights) {
    if (weights.empty()) raise(Errc::EmptyClass, "finite class needs >= 1 hypothesis");
    HypothesisClass c;
    c.weights_ = std::move(weights);
    return c;
}

HypothesisClass HypothesisClass::linear_ball(LinearBall ball) {
    if (ball.dim == 0) raise(Errc::DimensionMismatch, "ball dimension must be >= 1");
    if (!(ball.norm_bound > 0.0)) raise(Errc::OutOfRange, "norm bound must be > 0");
    if (ball.grid_points < 2) raise(Errc::EmptyClass, "ball grid needs >= 2 points");
    HypothesisClass c;
    c.is_ball_ = true;
    c.ball_ = ball;
    if (ball.dim == 1) {
        for (std::size_t g = 0; g < ball.grid_points; ++g) {
            double t = -1.0 + 2.0 * static_cast<double>(g) /
                                  static_cast<double>(ball.grid_points - 1);
            c.weights_.push_back({ball.norm_bound * t});
        }
    } else if (ball.dim == 2) {
        for (std::size_t g = 0; g < ball.grid_points; ++g) {
            double a = 2.0 * std::numbers::pi * static_cast<double>(g) /
                       static_cast<double>(ball.grid_points);
            c.weights_.push_back(
                {ball.norm_bound * std::cos(a), ball.norm_bound * std::sin(a)});
        }
    } else {
        // deterministic sphere sample; the seed is a fixed constant so the
        // grid depends only on the ball parameters, not on the caller
        Rng rng(RngSeed{0xBA11u});
        for (std::size_t g = 0; g < ball.grid_points; ++g) {
            std::vector<double> w(ball.dim);
            double norm = 0.0;
            for (auto& v : w) {
                v = rng.normal();
                norm += v * v;
            }
            norm = std::sqrt(std::max(norm, 1e-300));
            for (auto& v : w) v *= ball.norm_bound / norm;
            c.weights_.push_back(std::move(w));
        }
    }
    return c;
}

RadEstimate empirical_rademacher(const std::vector<PreferenceItem>& items,
                                 const HypothesisClass& hypotheses, LossKind loss,
                                 RadMode mode, RngSeed seed, double hinge_margin,
                                 double dpo_beta) {
    if (items.empty()) raise(Errc::EmptySample, "no items");
    LossMatrix L = make_loss_matrix(items, hypotheses.candidates(), loss,
                                    hinge_margin, dpo_beta);
    if (mode.exact) return rademacher_exact(L);
    Rng rng(seed);
    auto signs = draw_sign_vectors(mode.n_draws, items.size(), rng);
    return rademacher_mc(L, signs);
}

// ---------------------------------------------------------------------------
// dataset expectation

OrderingReport expected_rademacher_ordering(const ReplicaSampler& sampler,
                                            const std::vector<LabelSystem>& systems,
                                            const HypothesisClass& hypotheses,
                                            LossKind loss, std::size_t n_replicas,
                                            RadMode mode, RngSeed seed,
                                            double z_flag) {
    if (systems.empty()) raise(Errc::EmptyClass, "no label systems");
    if (n_replicas == 0) raise(Errc::EmptySample, "no replicas");

    OrderingReport rep;
    rep.per_replica.assign(systems.size(),
                           std::vector<double>(n_replicas, 0.0));

    Rng base(seed);
    parallel_for(n_replicas, [&](std::size_t t) {
        Rng replica = base.fork(t);
        Rng feat_rng = replica.fork(0);
        Rng label_rng = replica.fork(1);
        Rng sign_rng = replica.fork(2);

        std::vector<PreferenceItem> items = sampler(feat_rng);
        std::vector<double> uniforms(items.size());
        for (auto& u : uniforms) u = label_rng.uniform();

        std::vector<std::vector<signed char>> signs;
        if (!mode.exact)
            signs = draw_sign_vectors(mode.n_draws, items.size(), sign_rng);

        for (std::size_t s = 0; s < systems.size(); ++s) {
            std::vector<PreferenceItem> labeled = items;
            for (std::size_t i = 0; i < labeled.size(); ++i) {
                if (!labeled[i].oracle)
                    raise(Errc::MissingOracle, "sampler produced item without oracle");
                double o = *labeled[i].oracle;
                if (systems[s].scale) {
                    DiscreteMeasure m =
                        smallest_interval_measure(*systems[s].scale, o);
                    labeled[i].label = label_from_uniform(m, uniforms[i]);
                } else {
                    labeled[i].label = o;  // oracle values as labels
                }
            }
            LossMatrix L = make_loss_matrix(labeled, hypotheses.candidates(),
                                            loss, 2.0, 0.1);
            RadEstimate est = mode.exact ? rademacher_exact_serial(L)
                                         : rademacher_mc(L, signs);
            rep.per_replica[s][t] = est.value;
        }
    });

    for (std::size_t s = 0; s < systems.size(); ++s) {
        MeanStd ms = mean_std(rep.per_replica[s]);
        rep.systems.push_back({systems[s].name, {ms.mean, ms.stderr_mean}});
    }
    for (std::size_t a = 0; a < systems.size(); ++a) {
        for (std::size_t b = a + 1; b < systems.size(); ++b) {
            std::vector<double> diff(n_replicas);
            for (std::size_t t = 0; t < n_replicas; ++t)
                diff[t] = rep.per_replica[b][t] - rep.per_replica[a][t];
            MeanStd ms = mean_std(diff);
            PairedGap g;
            g.fine_index = a;
            g.coarse_index = b;
            g.gap_mean = ms.mean;
            g.gap_stderr = ms.stderr_mean;
            if (ms.stderr_mean > 0.0) {
                if (ms.mean > z_flag * ms.stderr_mean) g.flag = 1;
                else if (ms.mean < -z_flag * ms.stderr_mean) g.flag = -1;
            } else {
                g.flag = ms.mean > 0.0 ? 1 : (ms.mean < 0.0 ? -1 : 0);
            }
            rep.pairs.push_back(g);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// tiny instance

TinyInstance tiny_ordering_instance() {
    TinyInstance inst;
    const std::vector<double> true_w = {1.1, -0.7, 0.5};
    const double temperature = 2.0;
    const std::size_t n_items = 4;

    inst.sampler = [true_w, temperature, n_items](Rng& rng) {
        std::vector<PreferenceItem> items(n_items);
        for (std::size_t i = 0; i < n_items; ++i) {
            auto& it = items[i];
            it.id = "tiny-" + std::to_string(i);
            it.features1.resize(true_w.size());
            it.features2.resize(true_w.size());
            for (auto& v : it.features1) v = rng.normal();
            for (auto& v : it.features2) v = rng.normal();
            double d = 0.0;
            for (std::size_t k = 0; k < true_w.size(); ++k)
                d += true_w[k] * (it.features1[k] - it.features2[k]);
            it.oracle = sigmoid(d / temperature);
        }
        return items;
    };

    // sign corners of a 3-cube, scaled: 8 fixed linear scorers
    std::vector<std::vector<double>> corners;
    const double s[3] = {0.9, 0.6, 0.4};
    for (int mask = 0; mask < 8; ++mask)
        corners.push_back({(mask & 1) ? s[0] : -s[0],
                           (mask & 2) ? s[1] : -s[1],
                           (mask & 4) ? s[2] : -s[2]});
    inst.hypotheses = HypothesisClass::finite(std::move(corners));

    inst.systems = {
        {"oracle", std::nullopt},
        {"five_level", scale_preset(ScalePreset::FiveLevel)},
        {"three_level", scale_preset(ScalePreset::ThreeLevel)},
        {"binary", scale_preset(ScalePreset::Binary)},
    };
    return inst;
}

}  // namespace ordfb
