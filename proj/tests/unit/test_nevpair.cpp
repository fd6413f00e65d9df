#include "doctest.h"
#include "sturmnev/nevpair.hpp"

#include <cmath>

using namespace sturmnev;

TEST_CASE("oriented pairs pass validation") {
    for (auto [c0, c1] : {std::pair{"lambda", "-1"}, {"1", "0"}, {"0", "1"}, {"1", "lambda"},
                          {"lambda", "1"}, {"cos(lambda)", "sin(lambda)"}}) {
        const ValidationReport r = validate_pair(EntirePair::from_strings(c0, c1));
        if (std::string(c0) == "lambda" && std::string(c1) == "1") {
            CHECK_FALSE(r.passed());
            CHECK_FALSE(r.nevanlinna_sign.passed);
            continue;
        }
        if (std::string(c0) == "cos(lambda)") {
            // tau = -cot(lambda) maps the upper half-plane to itself
            CHECK(r.passed());
            continue;
        }
        CHECK_MESSAGE(r.passed(), c0, " / ", c1);
        CHECK(r.real_on_axis);
    }
}

TEST_CASE("pairs with the wrong orientation or common zeros are rejected") {
    CHECK_FALSE(validate_pair(EntirePair::from_strings("1", "-lambda")).nevanlinna_sign.passed);
    const ValidationReport common = validate_pair(EntirePair::from_strings("lambda - 1", "lambda^2 - 1"));
    CHECK_FALSE(common.no_common_zeros.passed);
    CHECK(std::abs(common.no_common_zeros.at - cplx(1.0)) < 1e-12);
}

TEST_CASE("symmetry fails for data that are not real on the axis") {
    const EntirePair p([](cplx l) { return l + cplx(0.0, 1.0); }, [](cplx) { return cplx(-1.0); }, "lambda + i", "-1");
    const ValidationReport r = validate_pair(p);
    CHECK_FALSE(r.symmetry.passed);
    CHECK_FALSE(r.real_on_axis);
}

TEST_CASE("non-entire sources are hinted") {
    CHECK(validate_pair(EntirePair::from_strings("sqrt(lambda)", "-1")).non_entire_hint);
    CHECK_FALSE(validate_pair(EntirePair::from_strings("lambda", "-1")).non_entire_hint);
}

TEST_CASE("classification at infinity") {
    SUBCASE("affine tau with positive slope") {
        const auto c = classify_infinity(EntirePair::from_strings("lambda", "-1"));
        CHECK(c.kind == InfinityCase::Case1);
        CHECK(c.b_inf == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(eta_relation(c).describe() == "Gamma0b y = 0");
    }
    SUBCASE("bounded tau: Robin condition") {
        // tau = 2 - 1 / (lambda + 1) -> 2 with y Im tau -> 1
        const auto c = classify_infinity(EntirePair::from_strings("-(2*lambda + 1)", "lambda + 1"));
        REQUIRE(c.kind == InfinityCase::Case2);
        REQUIRE(c.d_inf.has_value());
        CHECK(*c.d_inf == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(c.dhat_inf == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(eta_relation(c).kind == EtaKind::Robin);
    }
    SUBCASE("constant angle") {
        const auto c = classify_infinity(EntirePair::constant_angle(0.4));
        CHECK(c.kind == InfinityCase::Case2);
        CHECK(*c.d_inf == doctest::Approx(-1.0 / std::tan(0.4)).epsilon(1e-12));
    }
    SUBCASE("degenerate pair") {
        const auto c = classify_infinity(EntirePair::from_strings("1", "0"));
        CHECK(c.kind == InfinityCase::DegeneratePair);
        CHECK(eta_relation(c).kind == EtaKind::Gamma0Zero);
    }
    SUBCASE("unbounded y Im tau without a linear term") {
        // tau = tan(lambda): Im tau(iy) = tanh y, so y Im tau grows like y
        ClassifyOptions o;
        o.y_min = 1.0;
        o.decades = 3;
        o.growth_factor = 100.0;
        const auto c = classify_infinity(EntirePair::from_strings("-sin(lambda)", "cos(lambda)"), o);
        CHECK(c.kind == InfinityCase::Case3);
        CHECK(eta_relation(c).describe() == "Gamma0b y = Gamma1b y = 0");
    }
    SUBCASE("overflowing tau ladder is reported") {
        ClassifyOptions o;
        o.y_min = 1e3;
        CHECK_THROWS_AS(classify_infinity(EntirePair::from_strings("-sin(lambda)", "cos(lambda)"), o),
                        ClassificationError);
    }
}

TEST_CASE("scaling by a zero-free entire function keeps tau") {
    const EntirePair p = EntirePair::from_strings("lambda", "-1");
    const EntirePair q = p.scaled([](cplx l) { return std::exp(l / 8.0); }, "exp(lambda / 8)");
    for (cplx l : {cplx(1.0, 2.0), cplx(-3.0, 0.5)})
        CHECK(std::abs(*tau(p, l) - *tau(q, l)) < 1e-12 * std::abs(*tau(p, l)));
    CHECK(validate_pair(q).passed());
}
