#include "doctest.h"
#include "fixtures.hpp"
#include "sturmnev/expansion.hpp"

#include <cmath>
#include <numbers>

using namespace sturmnev;
using sturmnev::testing::make_problem;

constexpr double pi = std::numbers::pi;

namespace {

TargetFunction constant(double v) {
    TargetFunction t;
    t.y = [v](double) { return v; };
    t.y_quasi = [](double) { return 0.0; };
    t.f_y = [](double) { return 0.0; };
    return t;
}

CharacteristicPair dirichlet_pair() {
    return CharacteristicPair::automatic(make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "1", pi / 2),
                                         EntirePair::from_strings("1", "0"));
}

}  // namespace

TEST_CASE("Fourier coefficients of the constant function") {
    const auto cp = sturmnev::testing::eigen_dependent_bc();
    const auto dsf = find_eigenvalues(cp, -1.0, 120.0);
    REQUIRE(dsf.eigenvalues.size() == 4);
    const auto terms = expansion_terms(cp.problem(), dsf, constant(1.0));
    CHECK(terms[0].yhat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(terms[0].coefficient() == doctest::Approx(0.5).epsilon(1e-9));
    for (int k = 1; k < 4; ++k) {
        const double s = std::sqrt(terms[k].t);
        CHECK(terms[k].yhat == doctest::Approx(std::sin(s) / s).epsilon(1e-9));
    }
    CHECK(partial_sum(terms, 0)(0.3) == 0.0);
    CHECK(partial_sum(terms, 1)(0.3) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(partial_sum(terms, 5), ExpansionError);
}

TEST_CASE("Fourier coefficient against a weight vanishing on half the interval") {
    const Problem pr = make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "indicator(0, 1/2)", pi / 2);
    TargetFunction y;
    y.y = [](double x) { return x; };
    const double t = 7.3, s = std::sqrt(t);
    // integral of x cos(s x) over [0, 1/2] by parts
    const double expected = 0.5 * std::sin(s / 2) / s + (std::cos(s / 2) - 1.0) / (s * s);
    CHECK(fourier_coefficient(pr, t, y) == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("an eigenfunction expands to itself") {
    const auto cp = dirichlet_pair();
    const auto dsf = find_eigenvalues(cp, 0.0, 300.0);
    REQUIRE(dsf.eigenvalues.size() >= 3);
    const double t1 = dsf.eigenvalues[1].t;
    TargetFunction y;
    y.y = [s = std::sqrt(t1)](double x) { return std::cos(s * x); };
    const auto terms = expansion_terms(cp.problem(), dsf, y);
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (k == 1) CHECK(terms[k].coefficient() == doctest::Approx(1.0).epsilon(1e-8));
        else CHECK(std::abs(terms[k].yhat) < 1e-8);
    }
    const L2Report r = l2_report(cp.problem(), y, terms, {2, 3});
    for (const auto& row : r.rows) CHECK(row.residual < 1e-6);
}

TEST_CASE("residuals for the constant function decrease") {
    const auto cp = sturmnev::testing::eigen_dependent_bc();
    const auto dsf = find_eigenvalues(cp, -1.0, 2600.0);
    const auto terms = expansion_terms(cp.problem(), dsf, constant(1.0));
    REQUIRE(terms.size() >= 10);
    const L2Report r = l2_report(cp.problem(), constant(1.0), terms, {1, 5, 10});
    CHECK(r.norm_squared == doctest::Approx(1.0));
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].residual < r.rows[i - 1].residual);
    for (const auto& row : r.rows) CHECK(row.parseval_sum <= r.norm_squared * (1 + 1e-8));

    const UniformReport u = uniform_report(cp, {EtaKind::Gamma0Zero, 0.0}, constant(1.0), terms, {5, 10});
    CHECK_FALSE(u.eligibility.right_ok);
    CHECK(u.eligibility.left_ok);
    CHECK_FALSE(u.guaranteed);
}

TEST_CASE("zero target") {
    const auto cp = sturmnev::testing::eigen_dependent_bc();
    const auto dsf = find_eigenvalues(cp, -1.0, 120.0);
    const auto terms = expansion_terms(cp.problem(), dsf, constant(0.0));
    const L2Report r = l2_report(cp.problem(), constant(0.0), terms, {0, 2, 4});
    for (const auto& row : r.rows) CHECK(row.residual == 0.0);
    const UniformReport u = uniform_report(cp, {EtaKind::Gamma0Zero, 0.0}, constant(0.0), terms, {4});
    CHECK(u.guaranteed);
    CHECK(u.rows[0].sup_residual == 0.0);
}

TEST_CASE("eligibility of cos(3 pi x / 2)") {
    const auto cp = sturmnev::testing::eigen_dependent_bc();
    const double w = 1.5 * pi;
    TargetFunction y = TargetFunction::from_strings(cp.problem(), "cos(3*pi*x/2)", "-(3*pi/2)*sin(3*pi*x/2)",
                                                    "(3*pi/2)^2*cos(3*pi*x/2)");
    const Eligibility e = check_eligibility(cp, {EtaKind::Gamma0Zero, 0.0}, y);
    CHECK(e.eligible());
    CHECK_FALSE(e.finite_difference);
    CHECK(e.membership_residual < 1e-6);

    TargetFunction fd;
    fd.y = [w](double x) { return std::cos(w * x); };
    CHECK_THROWS_AS(check_eligibility(cp, {EtaKind::Gamma0Zero, 0.0}, fd), ExpansionError);
    UniformOptions o;
    o.allow_finite_difference = true;
    const Eligibility e2 = check_eligibility(cp, {EtaKind::Gamma0Zero, 0.0}, fd, o);
    CHECK(e2.finite_difference);
    CHECK(e2.membership_ok);
    CHECK(e2.right_ok);
    // the one-sided difference at a is only second order accurate
    CHECK(e2.left_defect < 1e-8);
}

TEST_CASE("values on the null set of the weight do not matter") {
    const Problem pr = make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "indicator(0, 1/2)", pi / 2);
    const auto cp = CharacteristicPair::automatic(pr, EntirePair::from_strings("1", "0"));
    const auto dsf = find_eigenvalues(cp, 0.0, 400.0);
    TargetFunction a, b;
    a.y = [](double x) { return x; };
    b.y = [](double x) { return x <= 0.5 ? x : std::sin(40 * x) + 3.0; };
    b.breakpoints = {0.5};
    const auto ta = expansion_terms(pr, dsf, a), tb = expansion_terms(pr, dsf, b);
    for (std::size_t k = 0; k < ta.size(); ++k) CHECK(std::abs(ta[k].yhat - tb[k].yhat) < 1e-12);
}
