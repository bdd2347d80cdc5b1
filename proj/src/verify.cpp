#include "ordfb/verify.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ordfb/coupling.hpp"
#include "ordfb/feedback.hpp"
#include "ordfb/losses.hpp"
#include "ordfb/softlabel.hpp"

namespace ordfb::verify {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<OrdinalScale> preset_scales() {
    return {scale_preset(ScalePreset::Binary), scale_preset(ScalePreset::ThreeLevel),
            scale_preset(ScalePreset::FiveLevel)};
}

}  // namespace

DiscreteMeasure random_measure(const OrdinalScale& scale, Rng& rng) {
    std::vector<double> mass(scale.size());
    double total = 0.0;
    for (auto& m : mass) {
        m = -std::log(1.0 - rng.uniform());
        total += m;
    }
    for (auto& m : mass) m /= total;
    // renormalize once more so the sum passes the 1e-12 gate exactly enough
    double check = 0.0;
    for (double m : mass) check += m;
    for (auto& m : mass) m /= check;
    return DiscreteMeasure(scale, std::move(mass));
}

std::vector<double> random_simplex_point(std::size_t k, Rng& rng) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& v : w) {
        v = -std::log(1.0 - rng.uniform());
        total += v;
    }
    for (auto& v : w) v /= total;
    return w;
}

// ---------------------------------------------------------------------------

SuiteResult affinity_suite(RngSeed seed, std::size_t n_measures) {
    SuiteResult suite;
    suite.suite = "affinity";
    Rng rng(seed);
    auto scales = preset_scales();
    auto probes = default_probe_grid();

    const LossKind kinds[] = {LossKind::Ce, LossKind::Hinge, LossKind::Dpo};
    double worst[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n_measures; ++i) {
        DiscreteMeasure m = random_measure(scales[i % scales.size()], rng);
        for (int k = 0; k < 3; ++k) {
            auto rep = verify_affinity(kinds[k], m, probes, 1e-12);
            worst[k] = std::max(worst[k], rep.max_gap);
        }
    }
    for (int k = 0; k < 3; ++k) {
        CheckResult c;
        c.name = std::string(loss_kind_name(kinds[k])) + "_affine_in_label";
        c.pass = worst[k] <= 1e-12;
        c.detail = "max gap " + fmt(worst[k]) + " over " +
                   std::to_string(n_measures) + " measures x " +
                   std::to_string(probes.size()) + " probes";
        suite.add(std::move(c));
    }

    // negative control: fair coin on {0,1}, probed at difference 0, must show
    // a gap of 0.25 for squared error
    DiscreteMeasure coin(scale_preset(ScalePreset::Binary), {0.5, 0.5});
    auto rep = verify_affinity(LossKind::Squared, coin, {0.0}, 1e-12);
    CheckResult c;
    c.name = "squared_loss_control_breaks_affinity";
    c.pass = rep.max_gap >= 0.1;
    c.detail = "gap " + fmt(rep.max_gap) + " (expected 0.25)";
    suite.add(std::move(c));
    return suite;
}

// ---------------------------------------------------------------------------

SuiteResult unbiasedness_suite(RngSeed seed, std::size_t n_oracles,
                               std::size_t n_decompositions,
                               std::size_t n_stream) {
    SuiteResult suite;
    suite.suite = "unbiasedness";
    Rng rng(seed);

    // smallest-interval measures hit the oracle mean exactly
    double worst_mean = 0.0;
    for (const auto& scale : preset_scales()) {
        for (std::size_t i = 0; i < n_oracles; ++i) {
            double o = rng.uniform();
            DiscreteMeasure m = smallest_interval_measure(scale, o);
            worst_mean = std::max(worst_mean, std::fabs(m.mean() - o));
        }
    }
    {
        CheckResult c;
        c.name = "smallest_interval_mean_equals_oracle";
        c.pass = worst_mean <= 1e-12;
        c.detail = "max |mean - oracle| " + fmt(worst_mean);
        suite.add(std::move(c));
    }

    // worked example: oracle 0.8 on the three-level scale
    {
        DiscreteMeasure m =
            smallest_interval_measure(scale_preset(ScalePreset::ThreeLevel), 0.8);
        double err = std::max({std::fabs(m.mass(0)), std::fabs(m.mass(1) - 0.4),
                               std::fabs(m.mass(2) - 0.6)});
        CheckResult c;
        c.name = "three_level_oracle_08_masses";
        c.pass = err <= 1e-12;
        c.detail = "max mass error " + fmt(err);
        suite.add(std::move(c));
    }

    // decomposition reconstructs random measures
    {
        OrdinalScale five = scale_preset(ScalePreset::FiveLevel);
        double worst_mass = 0.0, worst_wsum = 0.0;
        for (std::size_t i = 0; i < n_decompositions; ++i) {
            DiscreteMeasure m = random_measure(five, rng);
            Decomposition d = decompose_unbiased(m);
            double wsum = 0.0;
            for (const auto& comp : d.components) wsum += comp.weight;
            worst_wsum = std::max(worst_wsum, std::fabs(wsum - 1.0));
            DiscreteMeasure back = recompose(five, d);
            for (std::size_t l = 0; l < five.size(); ++l)
                worst_mass = std::max(worst_mass, std::fabs(back.mass(l) - m.mass(l)));
        }
        CheckResult c;
        c.name = "two_point_decomposition_roundtrip";
        c.pass = worst_mass <= 1e-9 && worst_wsum <= 1e-9;
        c.detail = "max mass error " + fmt(worst_mass) + ", max weight-sum error " +
                   fmt(worst_wsum);
        suite.add(std::move(c));
    }

    // generalized sampler == literal three-level rule, same seed and uniforms
    {
        OrdinalScale three = scale_preset(ScalePreset::ThreeLevel);
        RngSeed shared{rng.next_u64()};
        Rng oracle_rng(RngSeed{rng.next_u64()});
        Rng a(shared), b(shared);
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < n_stream; ++i) {
            double o = oracle_rng.uniform();
            DiscreteMeasure m = smallest_interval_measure(three, o);
            double general = sample_label(m, a);
            double reference = sample_three_level_reference(o, b);
            if (general != reference) ++mismatches;
        }
        CheckResult c;
        c.name = "three_level_sampler_matches_reference";
        c.pass = mismatches == 0;
        c.detail = std::to_string(mismatches) + " mismatches in " +
                   std::to_string(n_stream) + " draws";
        suite.add(std::move(c));
    }

    // empirical means of sampled labels track the oracle
    {
        OrdinalScale five = scale_preset(ScalePreset::FiveLevel);
        Rng srng(RngSeed{rng.next_u64()});
        bool all_pass = true;
        double worst_z = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            double o = srng.uniform();
            DiscreteMeasure m = smallest_interval_measure(five, o);
            std::vector<double> labels(20000);
            for (auto& l : labels) l = sample_label(m, srng);
            auto r = check_unbiasedness(labels, o, 4.0);
            all_pass = all_pass && r.pass;
            worst_z = std::max(worst_z, r.zscore);
        }
        CheckResult c;
        c.name = "sampled_labels_unbiased";
        c.pass = all_pass;
        c.detail = "worst z " + fmt(worst_z) + " (gate 4)";
        suite.add(std::move(c));
    }
    return suite;
}

// ---------------------------------------------------------------------------

SuiteResult coupling_suite(RngSeed seed, std::size_t n_measures,
                           std::size_t n_simplex) {
    SuiteResult suite;
    suite.suite = "coupling";
    Rng rng(seed);

    // binary coarsening validates for random measures on every preset
    {
        bool ok = true;
        std::string fail;
        double worst = 0.0;
        for (const auto& scale : preset_scales()) {
            for (std::size_t i = 0; i < n_measures && ok; ++i) {
                DiscreteMeasure m = random_measure(scale, rng);
                try {
                    CouplingSpec spec = to_binary_coupling(m);
                    double mean = m.mean();
                    worst = std::max(worst,
                                     std::fabs(spec.coarse_marginal[1] - mean));
                } catch (const Error& e) {
                    ok = false;
                    fail = e.what();
                }
            }
        }
        CheckResult c;
        c.name = "binary_coarsening_validates";
        c.pass = ok && worst <= 1e-9;
        c.detail = ok ? "max |coarse mass(1) - mean| " + fmt(worst) : fail;
        suite.add(std::move(c));
    }

    // oracle-to-measure coupling validates when the mean matches
    {
        bool ok = true;
        std::string fail;
        for (const auto& scale : preset_scales()) {
            for (std::size_t i = 0; i < n_measures && ok; ++i) {
                DiscreteMeasure m = random_measure(scale, rng);
                try {
                    oracle_coupling(m.mean(), m);
                } catch (const Error& e) {
                    ok = false;
                    fail = e.what();
                }
            }
        }
        CheckResult c;
        c.name = "oracle_coupling_validates";
        c.pass = ok;
        c.detail = ok ? std::to_string(n_measures) + " per preset" : fail;
        suite.add(std::move(c));
    }

    // soft-label witness: every coordinate of a simplex point couples to its
    // Bernoulli coarsening
    {
        bool ok = true;
        std::string fail;
        for (std::size_t i = 0; i < n_simplex && ok; ++i) {
            auto w = random_simplex_point(3, rng);
            try {
                soft_label_couplings(w);
            } catch (const Error& e) {
                ok = false;
                fail = e.what();
            }
        }
        CheckResult c;
        c.name = "soft_label_witness_validates";
        c.pass = ok;
        c.detail = ok ? std::to_string(n_simplex) + " simplex points" : fail;
        suite.add(std::move(c));
    }

    // corrupted rows fail with the named violations
    {
        OrdinalScale three = scale_preset(ScalePreset::ThreeLevel);
        OrdinalScale binary = scale_preset(ScalePreset::Binary);
        DiscreteMeasure fine = random_measure(three, rng);
        bool bary = false, stoch = false, marg = false;
        try {
            build_coupling(fine, binary,
                           {{0.5, 0.5}, {0.5, 0.5}, {0.0, 1.0}});
        } catch (const Error& e) {
            bary = e.code() == Errc::BarycenterViolation;
        }
        try {
            build_coupling(fine, binary,
                           {{1.0, 0.1}, {0.5, 0.5}, {0.0, 1.0}});
        } catch (const Error& e) {
            stoch = e.code() == Errc::RowNotStochastic;
        }
        try {
            DiscreteMeasure wrong(binary, {0.9, 0.1});
            build_coupling(fine, binary,
                           {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}}, wrong);
        } catch (const Error& e) {
            marg = e.code() == Errc::MarginalMismatch;
        }
        CheckResult c;
        c.name = "corrupted_couplings_rejected";
        c.pass = bary && stoch && marg;
        c.detail = std::string("barycenter ") + (bary ? "ok" : "MISSED") +
                   ", stochastic " + (stoch ? "ok" : "MISSED") + ", marginal " +
                   (marg ? "ok" : "MISSED");
        suite.add(std::move(c));
    }

    // joint samples reproduce the conditional rows
    {
        OrdinalScale five = scale_preset(ScalePreset::FiveLevel);
        DiscreteMeasure fine = random_measure(five, rng);
        CouplingSpec spec = to_binary_coupling(fine);
        Rng jrng(RngSeed{rng.next_u64()});
        auto joint = sample_joint(spec, 40000, jrng);
        bool ok = true;
        double worst_z = 0.0;
        for (std::size_t j = 0; j < five.size(); ++j) {
            std::vector<double> w_given;
            for (const auto& [w, wp] : joint)
                if (w == five.level(j)) w_given.push_back(wp);
            if (w_given.size() < 100) continue;  // too few hits to test
            auto r = check_unbiasedness(w_given, five.level(j), 4.5);
            ok = ok && r.pass;
            worst_z = std::max(worst_z, r.zscore);
        }
        CheckResult c;
        c.name = "joint_samples_match_conditionals";
        c.pass = ok;
        c.detail = "worst z " + fmt(worst_z) + " (gate 4.5)";
        suite.add(std::move(c));
    }

    // feasibility between the five- and three-level smallest-interval
    // marginals, scanned over oracles; reported, not gated
    {
        OrdinalScale five = scale_preset(ScalePreset::FiveLevel);
        OrdinalScale three = scale_preset(ScalePreset::ThreeLevel);
        int feasible = 0, total = 0;
        for (double o = 0.05; o < 0.975; o += 0.05) {
            DiscreteMeasure mf = smallest_interval_measure(five, o);
            DiscreteMeasure mc = smallest_interval_measure(three, o);
            ++total;
            if (find_coupling(mf, mc)) ++feasible;
        }
        CheckResult c;
        c.name = "five_to_three_feasibility_scan";
        c.pass = true;  // informational: existence is not asserted
        c.detail = std::to_string(feasible) + "/" + std::to_string(total) +
                   " oracle grid points admit a coupling";
        suite.add(std::move(c));
    }
    return suite;
}

// ---------------------------------------------------------------------------

SuiteResult rademacher_suite(RngSeed seed, std::size_t n_replicas) {
    SuiteResult suite;
    suite.suite = "rademacher";

    TinyInstance inst = tiny_ordering_instance();
    OrderingReport rep = expected_rademacher_ordering(
        inst.sampler, inst.systems, inst.hypotheses, LossKind::Ce, n_replicas,
        RadMode{true, 0}, seed);

    auto gap = [&](std::size_t a, std::size_t b) -> const PairedGap& {
        for (const auto& p : rep.pairs)
            if (p.fine_index == a && p.coarse_index == b) return p;
        raise(Errc::OutOfRange, "pair not found");
    };

    // chain: oracle <= five <= binary and oracle <= three <= binary
    {
        bool ok = true;
        std::ostringstream os;
        const std::pair<std::size_t, std::size_t> chain[] = {
            {0, 1}, {0, 2}, {1, 3}, {2, 3}};
        for (auto [a, b] : chain) {
            const auto& g = gap(a, b);
            bool pair_ok = g.gap_mean >= -3.0 * g.gap_stderr;
            ok = ok && pair_ok;
            os << rep.systems[a].name << "<=" << rep.systems[b].name << " gap "
               << fmt(g.gap_mean) << "+-" << fmt(g.gap_stderr) << "; ";
        }
        CheckResult c;
        c.name = "coarser_systems_not_less_complex";
        c.pass = ok;
        c.detail = os.str();
        suite.add(std::move(c));
    }
    {
        const auto& g = gap(0, 3);
        CheckResult c;
        c.name = "binary_strictly_above_oracle";
        c.pass = g.gap_mean > 3.0 * g.gap_stderr;
        c.detail = "gap " + fmt(g.gap_mean) + " stderr " + fmt(g.gap_stderr);
        suite.add(std::move(c));
    }

    // parallel kernel == serial reference, bit for bit, on one replica
    {
        Rng fixed(seed);
        auto items = inst.sampler(fixed);
        for (auto& it : items) it.label = *it.oracle;
        RadEstimate par = empirical_rademacher(items, inst.hypotheses,
                                               LossKind::Ce, RadMode{true, 0},
                                               RngSeed{0});
        LossMatrix L;
        for (const auto& w : inst.hypotheses.candidates()) {
            std::vector<double> row;
            for (const auto& it : items) {
                double d = 0.0;
                for (std::size_t k = 0; k < w.size(); ++k)
                    d += w[k] * (it.features1[k] - it.features2[k]);
                row.push_back(ce_loss(*it.label, {d, 0.0}));
            }
            L.push_back(std::move(row));
        }
        RadEstimate ser = rademacher_exact_serial(L);
        CheckResult c;
        c.name = "parallel_matches_serial_reference";
        c.pass = par.value == ser.value;
        c.detail = "parallel " + fmt(par.value) + ", serial " + fmt(ser.value);
        suite.add(std::move(c));
    }

    // Monte Carlo agrees with exact on a fixed replica
    {
        Rng fixed(RngSeed{seed.value ^ 0xABCDu});
        auto items = inst.sampler(fixed);
        for (auto& it : items) it.label = *it.oracle;
        RadEstimate exact = empirical_rademacher(
            items, inst.hypotheses, LossKind::Ce, RadMode{true, 0}, RngSeed{0});
        RadEstimate mc = empirical_rademacher(items, inst.hypotheses, LossKind::Ce,
                                              RadMode{false, 16384}, RngSeed{11});
        double gap_abs = std::fabs(mc.value - exact.value);
        CheckResult c;
        c.name = "monte_carlo_consistent_with_exact";
        c.pass = gap_abs <= 3.0 * mc.stderr_value + 1e-9;
        c.detail = "gap " + fmt(gap_abs) + ", mc stderr " + fmt(mc.stderr_value);
        suite.add(std::move(c));
    }
    return suite;
}

// ---------------------------------------------------------------------------

std::vector<SuiteResult> run_suites(const std::string& which, RngSeed seed) {
    std::vector<SuiteResult> out;
    bool all = which == "all";
    if (all || which == "affinity") out.push_back(affinity_suite(seed));
    if (all || which == "unbiasedness") out.push_back(unbiasedness_suite(seed));
    if (all || which == "coupling") out.push_back(coupling_suite(seed));
    if (all || which == "rademacher") out.push_back(rademacher_suite(seed));
    if (out.empty())
        raise(Errc::ConfigError,
              "suite (expected affinity|unbiasedness|coupling|rademacher|all)");
    return out;
}

std::string suites_to_json(const std::vector<SuiteResult>& suites) {
    nlohmann::json root;
    bool pass = true;
    root["suites"] = nlohmann::json::array();
    for (const auto& s : suites) {
        nlohmann::json js;
        js["suite"] = s.suite;
        js["pass"] = s.pass;
        js["checks"] = nlohmann::json::array();
        for (const auto& c : s.checks) {
            js["checks"].push_back(
                {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        }
        root["suites"].push_back(js);
        pass = pass && s.pass;
    }
    root["pass"] = pass;
    return root.dump(2) + "\n";
}

}  // namespace ordfb::verify
