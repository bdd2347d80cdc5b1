#include <cmath>
#include <vector>

#include <doctest.h>

#include "ordfb/core_types.hpp"
#include "ordfb/losses.hpp"
#include "test_support.hpp"

using namespace ordfb;
using testutil::central_diff;
using testutil::thrown_code;

TEST_CASE("sigmoid is stable and stays inside (0,1)") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
    double hi = sigmoid(800.0), lo = sigmoid(-800.0);
    CHECK(std::isfinite(hi));
    CHECK(std::isfinite(lo));
    CHECK(hi < 1.0);
    CHECK(lo > 0.0);
    CHECK(sigmoid(30.0) + sigmoid(-30.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cross-entropy: frozen values") {
    // even label at zero margin: -0.5 log 0.5 - 0.5 log 0.5 = log 2
    CHECK(ce_loss(0.5, {0.0, 0.0}) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-14));
    // z = 0.8 at difference log 3: sigmoid = 0.75,
    // -0.8 log 0.75 - 0.2 log 0.25 = 0.5074045301854028
    CHECK(ce_loss(0.8, {std::log(3.0), 0.0}) ==
          doctest::Approx(0.5074045301854028).epsilon(1e-12));
    // shifting both rewards leaves the loss unchanged
    CHECK(ce_loss(0.3, {2.0, 1.0}) ==
          doctest::Approx(ce_loss(0.3, {11.0, 10.0})).epsilon(1e-14));
    CHECK(std::isfinite(ce_loss(1.0, {-800.0, 0.0})));
    CHECK(*thrown_code([] { ce_loss(1.2, {0.0, 0.0}); }) ==
          Errc::LabelOutOfRange);
}

TEST_CASE("hinge: frozen values and kink behavior") {
    // margin 2: full preference at zero difference costs the whole margin
    CHECK(hinge_loss(1.0, {0.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    // z = 0 with difference +1: (1-z) side pays margin + d = 3
    CHECK(hinge_loss(0.0, {1.0, 0.0}) == doctest::Approx(3.0).epsilon(1e-14));
    // tied label at difference 1: 0.5*1 + 0.5*3 = 2
    CHECK(hinge_loss(0.5, {1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    // outside both hinges the loss is flat at 0 for the satisfied side
    CHECK(hinge_loss(1.0, {5.0, 0.0}) == 0.0);
    CHECK(*thrown_code([] { hinge_loss(0.5, {0.0, 0.0}, -1.0); }) ==
          Errc::OutOfRange);
}

TEST_CASE("policy log-ratio loss equals cross-entropy on the implied difference") {
    Rng rng(RngSeed{404});
    for (int i = 0; i < 50; ++i) {
        DpoPairScore s;
        s.lp1_policy = -3.0 * rng.uniform();
        s.lp1_ref = -3.0 * rng.uniform();
        s.lp2_policy = -3.0 * rng.uniform();
        s.lp2_ref = -3.0 * rng.uniform();
        s.beta = 0.05 + rng.uniform();
        double z = rng.uniform();
        double d = s.beta * ((s.lp1_policy - s.lp1_ref) - (s.lp2_policy - s.lp2_ref));
        CHECK(std::fabs(dpo_loss(z, s) - ce_loss(z, {d, 0.0})) <= 1e-15);
    }
    CHECK(*thrown_code([] {
        dpo_loss(0.5, {0.0, 0.0, 0.0, 0.0, 0.0});
    }) == Errc::NonpositiveBeta);
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(RngSeed{808});
    for (int i = 0; i < 10; ++i) {
        double z = rng.uniform();
        double r1 = 4.0 * rng.uniform() - 2.0;
        double r2 = 4.0 * rng.uniform() - 2.0;

        auto ce1 = [&](double x) { return ce_loss(z, {x, r2}); };
        auto ce2 = [&](double x) { return ce_loss(z, {r1, x}); };
        PairScore g = ce_loss_grad(z, {r1, r2});
        CHECK(testutil::rel_err(g.r1, central_diff(ce1, r1)) < 1e-6);
        CHECK(testutil::rel_err(g.r2, central_diff(ce2, r2)) < 1e-6);

        DpoPairScore s{0.5 * r1, -0.3, 0.5 * r2, -0.7, 0.25};
        auto d1 = [&](double x) {
            DpoPairScore t = s;
            t.lp1_policy = x;
            return dpo_loss(z, t);
        };
        auto d2 = [&](double x) {
            DpoPairScore t = s;
            t.lp2_policy = x;
            return dpo_loss(z, t);
        };
        DpoGrad dg = dpo_loss_grad(z, s);
        CHECK(testutil::rel_err(dg.d_lp1_policy, central_diff(d1, s.lp1_policy)) <
              1e-6);
        CHECK(testutil::rel_err(dg.d_lp2_policy, central_diff(d2, s.lp2_policy)) <
              1e-6);
    }
    // hinge at a smooth point (both hinge arguments active, away from kinks)
    double z = 0.4, r1 = 0.3, r2 = 0.1;
    auto h1 = [&](double x) { return hinge_loss(z, {x, r2}); };
    PairScore hg = hinge_loss_grad(z, {r1, r2});
    CHECK(testutil::rel_err(hg.r1, central_diff(h1, r1)) < 1e-6);
}

TEST_CASE("affinity holds for ce, hinge, dpo and fails for squared") {
    auto three = scale_preset(ScalePreset::ThreeLevel);
    DiscreteMeasure m(three, {0.1, 0.2, 0.7});
    auto probes = default_probe_grid();
    REQUIRE(probes.size() == 13);
    CHECK(probes.front() == -6.0);
    CHECK(probes.back() == 6.0);

    for (LossKind kind : {LossKind::Ce, LossKind::Hinge, LossKind::Dpo}) {
        auto rep = verify_affinity(kind, m, probes, 1e-12);
        CHECK(rep.affine);
        CHECK(rep.max_gap <= 1e-12);
    }
    DiscreteMeasure coin(scale_preset(ScalePreset::Binary), {0.5, 0.5});
    auto sq = verify_affinity(LossKind::Squared, coin, {0.0}, 1e-12);
    CHECK(!sq.affine);
    // E (z - 0.5)^2 = 0.25 vs (0.5 - 0.5)^2 = 0 at probe 0
    CHECK(sq.max_gap == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("eval_loss_at_diff agrees with the direct forms") {
    CHECK(eval_loss_at_diff(LossKind::Ce, 0.7, 1.3) ==
          ce_loss(0.7, {1.3, 0.0}));
    CHECK(eval_loss_at_diff(LossKind::Hinge, 0.7, 1.3) ==
          hinge_loss(0.7, {1.3, 0.0}));
    // the policy probe reproduces an implied difference equal to t
    CHECK(eval_loss_at_diff(LossKind::Dpo, 0.7, 1.3) ==
          doctest::Approx(ce_loss(0.7, {1.3, 0.0})).epsilon(1e-14));
    CHECK(std::string(loss_kind_name(LossKind::Dpo)) == "dpo");
}
