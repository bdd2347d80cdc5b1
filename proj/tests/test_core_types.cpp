#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "ordfb/core_types.hpp"
#include "test_support.hpp"

using namespace ordfb;
using testutil::thrown_code;

TEST_CASE("error codes carry names and survive the throw") {
    CHECK(std::string(errc_name(Errc::NonMonotone)) == "NonMonotone");
    CHECK(std::string(errc_name(Errc::ConfigError)) == "ConfigError");
    auto code = thrown_code([] { raise(Errc::OutOfRange, "probe"); });
    REQUIRE(code.has_value());
    CHECK(*code == Errc::OutOfRange);
    try {
        raise(Errc::LabelMismatch, "detail text");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("detail text") != std::string::npos);
    }
}

TEST_CASE("rng streams are pure functions of the seed") {
    Rng a(RngSeed{123}), b(RngSeed{123}), c(RngSeed{124});
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        double ua = a.uniform(), ub = b.uniform(), uc = c.uniform();
        all_equal = all_equal && ua == ub;
        any_diff = any_diff || ua != uc;
        CHECK(ua >= 0.0);
        CHECK(ua < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("rng forks are independent substreams") {
    Rng base(RngSeed{7});
    Rng f0 = base.fork(0), f1 = base.fork(1);
    Rng f0_again = base.fork(0);
    bool same = true, differ = false;
    for (int i = 0; i < 100; ++i) {
        double a = f0.uniform(), b = f0_again.uniform(), c = f1.uniform();
        same = same && a == b;
        differ = differ || a != c;
    }
    CHECK(same);
    CHECK(differ);
    // forking does not advance the parent
    Rng parent(RngSeed{7});
    double before = Rng(RngSeed{7}).uniform();
    (void)parent.fork(42);
    CHECK(parent.uniform() == before);
}

TEST_CASE("bernoulli uses the u < p convention") {
    // replay the same stream through uniform() and bernoulli(p)
    Rng a(RngSeed{55}), b(RngSeed{55});
    for (int i = 0; i < 2000; ++i) {
        double u = a.uniform();
        bool hit = b.bernoulli(0.3);
        CHECK(hit == (u < 0.3));
    }
}

TEST_CASE("normal draws consume two uniforms and look gaussian") {
    Rng rng(RngSeed{99});
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.03);
    CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_CASE("ordinal scale validation") {
    auto scale = OrdinalScale::validated({0.0, 0.5, 1.0});
    CHECK(scale.size() == 3);
    CHECK(scale.level(1) == 0.5);

    CHECK(*thrown_code([] { OrdinalScale::validated({0.5, 0.5, 1.0}); }) ==
          Errc::NonMonotone);
    CHECK(*thrown_code([] { OrdinalScale::validated({0.8, 0.2}); }) ==
          Errc::NonMonotone);
    CHECK(*thrown_code([] { OrdinalScale::validated({-0.1, 1.0}); }) ==
          Errc::OutOfRange);
    CHECK(*thrown_code([] { OrdinalScale::validated({0.0, 1.1}); }) ==
          Errc::OutOfRange);
    CHECK(*thrown_code([] { OrdinalScale::validated({0.4}); }) ==
          Errc::NonMonotone);
    CHECK(*thrown_code([] {
        OrdinalScale::validated({0.0, 1.0}, {"only-one-label"});
    }) == Errc::LabelMismatch);
}

TEST_CASE("singleton scale is the one-point exception") {
    auto s = OrdinalScale::singleton(0.37);
    CHECK(s.size() == 1);
    CHECK(s.level(0) == 0.37);
    CHECK(*thrown_code([] { OrdinalScale::singleton(1.5); }) == Errc::OutOfRange);
}

TEST_CASE("index_of respects its tolerance") {
    auto scale = scale_preset(ScalePreset::FiveLevel);
    CHECK(*scale.index_of(0.2) == 1);
    CHECK(*scale.index_of(0.2 + 1e-10) == 1);
    CHECK(!scale.index_of(0.21).has_value());
    CHECK(*scale.index_of(0.3, 0.11) == 1);
}

TEST_CASE("preset scales match their published levels and labels") {
    auto b = scale_preset(ScalePreset::Binary);
    CHECK(b.levels() == std::vector<double>{0.0, 1.0});
    CHECK(b.labels() == std::vector<std::string>{"worse", "better"});

    auto t = scale_preset(ScalePreset::ThreeLevel);
    CHECK(t.levels() == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(t.labels() == std::vector<std::string>{"worse", "same-as", "better"});

    auto f = scale_preset(ScalePreset::FiveLevel);
    CHECK(f.levels() == std::vector<double>{0.0, 0.2, 0.5, 0.8, 1.0});
    CHECK(f.labels() ==
          std::vector<std::string>{"worse", "slightly-worse", "same",
                                   "slightly-better", "better"});
    CHECK(std::string(scale_preset_name(ScalePreset::ThreeLevel)) ==
          "three_level");
}

TEST_CASE("discrete measures validate mass vectors") {
    auto scale = scale_preset(ScalePreset::ThreeLevel);
    DiscreteMeasure m(scale, {0.2, 0.3, 0.5});
    CHECK(m.mass(2) == 0.5);
    CHECK(m.mean() == doctest::Approx(0.65).epsilon(1e-12));

    CHECK(*thrown_code([&] { DiscreteMeasure(scale, {0.2, 0.3}); }) ==
          Errc::DimensionMismatch);
    CHECK(*thrown_code([&] { DiscreteMeasure(scale, {0.5, 0.6, 0.1}); }) ==
          Errc::OutOfRange);
    CHECK(*thrown_code([&] { DiscreteMeasure(scale, {-0.1, 0.6, 0.5}); }) ==
          Errc::OutOfRange);

    auto d = DiscreteMeasure::dirac(scale, 1);
    CHECK(d.mass(1) == 1.0);
    CHECK(d.mean() == 0.5);
}

TEST_CASE("item validation") {
    PreferenceItem it;
    it.id = "x";
    it.features1 = {1.0, 2.0};
    it.features2 = {0.5, -1.0};
    validate_item(it);  // oracle and label optional

    PreferenceItem bad = it;
    bad.features2 = {1.0};
    CHECK(*thrown_code([&] { validate_item(bad); }) == Errc::DimensionMismatch);

    bad = it;
    bad.oracle = 1.2;
    CHECK(*thrown_code([&] { validate_item(bad); }) == Errc::OutOfRange);

    auto scale = scale_preset(ScalePreset::Binary);
    bad = it;
    bad.label = 0.5;
    CHECK(*thrown_code([&] { validate_item(bad, &scale); }) ==
          Errc::LabelOutOfRange);
    bad.label = 1.0;
    validate_item(bad, &scale);
}
