#include "ordfb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ordfb/parallel.hpp"

namespace ordfb {

namespace {

double score_diff(const std::vector<double>& w, const PreferenceItem& it) {
    double acc = 0.0;
    for (std::size_t d = 0; d < w.size(); ++d)
        acc += w[d] * (it.features1[d] - it.features2[d]);
    return acc;
}

double item_loss(const PreferenceItem& it, const std::vector<double>& w,
                 const TrainConfig& cfg) {
    double d = score_diff(w, it);
    if (cfg.loss == LossKind::Hinge)
        return hinge_loss(*it.label, {d, 0.0}, cfg.hinge_margin);
    return ce_loss(*it.label, {d, 0.0});
}

// d(loss)/d(score diff)
double item_loss_slope(const PreferenceItem& it, double d, const TrainConfig& cfg) {
    if (cfg.loss == LossKind::Hinge)
        return hinge_loss_grad(*it.label, {d, 0.0}, cfg.hinge_margin).r1;
    return sigmoid(d) - *it.label;
}

void check_items(const std::vector<PreferenceItem>& items, std::size_t dim,
                 bool need_label) {
    if (items.empty()) raise(Errc::EmptySample, "empty dataset");
    for (const auto& it : items) {
        if (it.features1.size() != dim || it.features2.size() != dim)
            raise(Errc::DimensionMismatch, "feature dim mismatch in " + it.id);
        if (need_label && !it.label)
            raise(Errc::MissingOracle, "item lacks a label: " + it.id);
        if (!need_label && !it.oracle)
            raise(Errc::MissingOracle, "item lacks an oracle: " + it.id);
    }
}

}  // namespace

SyntheticWorld make_world(std::size_t dim, RngSeed seed) {
    if (dim == 0) raise(Errc::DimensionMismatch, "world dimension must be >= 1");
    SyntheticWorld w;
    w.dim = dim;
    w.true_weights.resize(dim);
    Rng rng(seed);
    for (auto& v : w.true_weights) v = rng.normal();
    return w;
}

double oracle_probability(const SyntheticWorld& world,
                          const std::vector<double>& f1,
                          const std::vector<double>& f2) {
    if (f1.size() != world.dim || f2.size() != world.dim)
        raise(Errc::DimensionMismatch, "feature dim != world dim");
    double d = 0.0;
    for (std::size_t i = 0; i < world.dim; ++i)
        d += world.true_weights[i] * (f1[i] - f2[i]);
    return sigmoid(d / world.temperature);
}

std::vector<PreferenceItem> generate_dataset(const SyntheticWorld& world,
                                             std::size_t n,
                                             const LabelSystem& system, Rng& rng,
                                             bool ood) {
    std::vector<PreferenceItem> items(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& it = items[i];
        it.id = (ood ? "ood-" : "id-") + std::to_string(i);
        it.features1.resize(world.dim);
        it.features2.resize(world.dim);
        for (auto& v : it.features1) v = rng.normal();
        for (auto& v : it.features2) v = rng.normal();
        if (ood) {
            for (auto& v : it.features1) v = v * world.ood_scale + world.ood_shift;
            for (auto& v : it.features2) v = v * world.ood_scale + world.ood_shift;
        }
        it.oracle = oracle_probability(world, it.features1, it.features2);
        double u = rng.uniform();  // consumed for every system, keeps streams aligned
        if (system.scale) {
            DiscreteMeasure m = smallest_interval_measure(*system.scale, *it.oracle);
            it.label = label_from_uniform(m, u);
        } else {
            it.label = *it.oracle;
        }
    }
    return items;
}

double batch_objective(const std::vector<PreferenceItem>& items,
                       const std::vector<double>& weights, const TrainConfig& cfg) {
    check_items(items, weights.size(), /*need_label=*/true);
    double mean = block_sum_parallel(items.size(), [&](std::size_t i) {
                      return item_loss(items[i], weights, cfg);
                  }) /
                  static_cast<double>(items.size());
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    double obj = mean + 0.5 * cfg.l2 * reg;
    if (!std::isfinite(obj)) raise(Errc::NonfiniteLoss, "objective diverged");
    return obj;
}

std::vector<double> batch_gradient(const std::vector<PreferenceItem>& items,
                                   const std::vector<double>& weights,
                                   const TrainConfig& cfg) {
    check_items(items, weights.size(), /*need_label=*/true);
    const std::size_t dim = weights.size();
    std::vector<double> grad(dim, 0.0);
    // per-item slopes first (parallel, slot-per-item), then a fixed-order
    // accumulation so the gradient is reproducible under threading
    std::vector<double> slopes(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        slopes[i] = item_loss_slope(items[i], score_diff(weights, items[i]), cfg);
    });
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        for (std::size_t d = 0; d < dim; ++d)
            grad[d] += slopes[i] * (it.features1[d] - it.features2[d]);
    }
    double inv_n = 1.0 / static_cast<double>(items.size());
    for (std::size_t d = 0; d < dim; ++d)
        grad[d] = grad[d] * inv_n + cfg.l2 * weights[d];
    return grad;
}

double sign_accuracy(const std::vector<PreferenceItem>& items,
                     const std::vector<double>& weights) {
    check_items(items, weights.size(), /*need_label=*/false);
    std::size_t hits = 0, total = 0;
    for (const auto& it : items) {
        double o = *it.oracle;
        if (o == 0.5) continue;  // no preferred side to predict
        ++total;
        double d = score_diff(weights, it);
        if ((d > 0.0 && o > 0.5) || (d < 0.0 && o < 0.5)) ++hits;
    }
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

double eval_oracle_ce(const std::vector<PreferenceItem>& items,
                      const std::vector<double>& weights) {
    double acc = 0.0;
    for (const auto& it : items)
        acc += ce_loss(*it.oracle, {score_diff(weights, it), 0.0});
    return acc / static_cast<double>(items.size());
}

}  // namespace

RunReport train(const std::vector<PreferenceItem>& data, const TrainConfig& cfg,
                const EvalSets& eval) {
    if (data.empty()) raise(Errc::EmptySample, "empty training set");
    if (eval.id_items.empty() || eval.ood_items.empty())
        raise(Errc::EmptySample, "empty eval set");
    const std::size_t dim = data[0].features1.size();
    check_items(data, dim, /*need_label=*/true);
    check_items(eval.id_items, dim, /*need_label=*/false);
    check_items(eval.ood_items, dim, /*need_label=*/false);
    if (!(cfg.learning_rate > 0.0)) raise(Errc::ConfigError, "learning_rate");
    if (!(cfg.l2 >= 0.0)) raise(Errc::ConfigError, "l2");

    RunReport rep;
    rep.weights.assign(dim, 0.0);
    std::vector<double> velocity(dim, 0.0);

    auto record = [&](std::size_t epoch) {
        EvalPoint p;
        p.epoch = epoch;
        p.train_objective = batch_objective(data, rep.weights, cfg);
        p.oracle_ce = eval_oracle_ce(eval.id_items, rep.weights);
        p.id_accuracy = sign_accuracy(eval.id_items, rep.weights);
        p.ood_accuracy = sign_accuracy(eval.ood_items, rep.weights);
        rep.curve.push_back(p);
    };

    record(0);
    Rng shuffle_rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= data.size();
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (full_batch) {
            std::vector<double> grad = batch_gradient(data, rep.weights, cfg);
            for (std::size_t d = 0; d < dim; ++d) {
                velocity[d] = cfg.momentum * velocity[d] - cfg.learning_rate * grad[d];
                rep.weights[d] += velocity[d];
            }
        } else {
            // Fisher-Yates with the run's own stream
            for (std::size_t i = order.size(); i > 1; --i) {
                std::size_t j = static_cast<std::size_t>(
                    shuffle_rng.uniform() * static_cast<double>(i));
                if (j >= i) j = i - 1;
                std::swap(order[i - 1], order[j]);
            }
            for (std::size_t start = 0; start < order.size();
                 start += cfg.batch_size) {
                std::size_t stop = std::min(order.size(), start + cfg.batch_size);
                std::vector<PreferenceItem> batch;
                batch.reserve(stop - start);
                for (std::size_t i = start; i < stop; ++i)
                    batch.push_back(data[order[i]]);
                std::vector<double> grad = batch_gradient(batch, rep.weights, cfg);
                for (std::size_t d = 0; d < dim; ++d) {
                    velocity[d] =
                        cfg.momentum * velocity[d] - cfg.learning_rate * grad[d];
                    rep.weights[d] += velocity[d];
                }
            }
        }
        for (double w : rep.weights)
            if (!std::isfinite(w)) raise(Errc::NonfiniteLoss, "weights diverged");
        if (epoch == cfg.epochs ||
            (cfg.eval_every > 0 && epoch % cfg.eval_every == 0))
            record(epoch);
    }
    double norm = 0.0;
    for (double w : rep.weights) norm += w * w;
    rep.final_weight_norm = std::sqrt(norm);
    return rep;
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

SweepSummaryRow summarize(const std::string& key,
                          const std::vector<const SweepCell*>& cells) {
    std::vector<double> ce, ida, ooda;
    for (const auto* c : cells) {
        ce.push_back(c->final_oracle_ce);
        ida.push_back(c->final_id_accuracy);
        ooda.push_back(c->final_ood_accuracy);
    }
    SweepSummaryRow row;
    row.key = key;
    MeanStd m1 = mean_std(ce), m2 = mean_std(ida), m3 = mean_std(ooda);
    row.oracle_ce_mean = m1.mean;
    row.oracle_ce_std = m1.stddev;
    row.id_accuracy_mean = m2.mean;
    row.id_accuracy_std = m2.stddev;
    row.ood_accuracy_mean = m3.mean;
    row.ood_accuracy_std = m3.stddev;
    return row;
}

void fill_summary(SweepResult& result, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
        std::vector<const SweepCell*> cells;
        for (const auto& c : result.cells)
            if (c.key == key) cells.push_back(&c);
        result.summary.push_back(summarize(key, cells));
    }
}

EvalSets make_eval_sets(const SyntheticWorld& world, std::size_t n_eval, Rng& rng) {
    EvalSets eval;
    LabelSystem oracle_system{"oracle", std::nullopt};
    Rng id_rng = rng.fork(101);
    Rng ood_rng = rng.fork(202);
    eval.id_items = generate_dataset(world, n_eval, oracle_system, id_rng, false);
    eval.ood_items = generate_dataset(world, n_eval, oracle_system, ood_rng, true);
    return eval;
}

SweepCell run_cell(const std::string& key, std::uint64_t seed,
                   const std::vector<PreferenceItem>& data, const TrainConfig& cfg,
                   const EvalSets& eval) {
    TrainConfig local = cfg;
    local.seed = RngSeed{seed};
    RunReport rep = train(data, local, eval);
    SweepCell cell;
    cell.key = key;
    cell.seed = seed;
    cell.curve = rep.curve;
    const EvalPoint& last = rep.curve.back();
    cell.final_oracle_ce = last.oracle_ce;
    cell.final_id_accuracy = last.id_accuracy;
    cell.final_ood_accuracy = last.ood_accuracy;
    cell.final_weight_norm = rep.final_weight_norm;
    return cell;
}

}  // namespace

SweepResult granularity_sweep(const SyntheticWorld& world, std::size_t n_train,
                              std::size_t n_eval,
                              const std::vector<LabelSystem>& systems,
                              const std::vector<std::uint64_t>& seeds,
                              const TrainConfig& cfg) {
    if (systems.empty()) raise(Errc::ConfigError, "systems list is empty");
    if (seeds.empty()) raise(Errc::ConfigError, "seeds list is empty");

    SweepResult result;
    result.cells.resize(systems.size() * seeds.size());
    parallel_for(result.cells.size(), [&](std::size_t idx) {
        std::size_t si = idx / seeds.size();
        std::size_t ti = idx % seeds.size();
        Rng base(RngSeed{seeds[ti]});
        // one data stream per seed: every system replays the same features
        // and the same label uniforms
        Rng data_rng = base.fork(1);
        std::vector<PreferenceItem> data =
            generate_dataset(world, n_train, systems[si], data_rng, false);
        Rng eval_rng = base.fork(2);
        EvalSets eval = make_eval_sets(world, n_eval, eval_rng);
        result.cells[idx] = run_cell(systems[si].name, seeds[ti], data, cfg, eval);
    });

    std::vector<std::string> keys;
    for (const auto& s : systems) keys.push_back(s.name);
    fill_summary(result, keys);
    return result;
}

namespace {

std::string ratio_key(double ratio) {
    // fixed formatting so CSV keys are stable
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", ratio);
    return buf;
}

// Tied items come from the resampling mechanism: draw three-level labels and
// keep only items whose label lands on 0.5. Untied items are plain
// binary-labeled draws, so ratio 0 reduces to the binary baseline.
std::vector<PreferenceItem> tied_mixture_dataset(const SyntheticWorld& world,
                                                 std::size_t n, double ratio,
                                                 Rng& rng) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) raise(Errc::ConfigError, "ratio");
    std::size_t want_tied =
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    std::vector<PreferenceItem> out;
    out.reserve(n);

    LabelSystem three{"three_level", scale_preset(ScalePreset::ThreeLevel)};
    const std::size_t max_draws = 1000 * n + 1000;
    std::size_t draws = 0;
    while (out.size() < want_tied) {
        if (draws++ >= max_draws)
            raise(Errc::EmptySample, "tied-ratio rejection sampling stalled");
        std::vector<PreferenceItem> one =
            generate_dataset(world, 1, three, rng, false);
        if (*one[0].label == 0.5) out.push_back(std::move(one[0]));
    }

    if (std::size_t untied = n - want_tied; untied > 0) {
        LabelSystem binary{"binary", scale_preset(ScalePreset::Binary)};
        std::vector<PreferenceItem> rest =
            generate_dataset(world, untied, binary, rng, false);
        for (auto& item : rest) out.push_back(std::move(item));
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].id = "mix-" + std::to_string(i);
    return out;
}

}  // namespace

SweepResult tied_ratio_sweep(const SyntheticWorld& world, std::size_t n_train,
                             std::size_t n_eval, const std::vector<double>& ratios,
                             const std::vector<std::uint64_t>& seeds,
                             const TrainConfig& cfg) {
    if (ratios.empty()) raise(Errc::ConfigError, "ratios list is empty");
    if (seeds.empty()) raise(Errc::ConfigError, "seeds list is empty");

    SweepResult result;
    result.cells.resize(ratios.size() * seeds.size());
    parallel_for(result.cells.size(), [&](std::size_t idx) {
        std::size_t ri = idx / seeds.size();
        std::size_t ti = idx % seeds.size();
        Rng base(RngSeed{seeds[ti]});
        Rng data_rng = base.fork(1000 + ri);
        std::vector<PreferenceItem> data =
            tied_mixture_dataset(world, n_train, ratios[ri], data_rng);
        Rng eval_rng = base.fork(2);  // eval shared across ratios within a seed
        EvalSets eval = make_eval_sets(world, n_eval, eval_rng);
        result.cells[idx] =
            run_cell(ratio_key(ratios[ri]), seeds[ti], data, cfg, eval);
    });

    std::vector<std::string> keys;
    for (double r : ratios) keys.push_back(ratio_key(r));
    fill_summary(result, keys);
    return result;
}

}  // namespace ordfb
