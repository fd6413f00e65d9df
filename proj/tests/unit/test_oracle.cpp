#include "doctest.h"
#include "fixtures.hpp"
#include "sturmnev/oracle.hpp"

#include <cmath>
#include <numbers>

using namespace sturmnev;
using sturmnev::testing::make_problem;

constexpr double pi = std::numbers::pi;

namespace {

double tan_root(int k) {
    return bisect_root([](double s) { return s + std::tan(s); }, (k - 0.5) * pi + 1e-9, (k + 0.5) * pi - 1e-9,
                       1e-14);
}

Pencil laplacian3() {
    const double h = 0.25;
    Pencil p;
    p.a_diag = Eigen::VectorXd::Constant(3, 2.0 / (h * h));
    p.a_off = Eigen::VectorXd::Constant(2, -1.0 / (h * h));
    p.mass = Eigen::VectorXd::Ones(3);
    return p;
}

}  // namespace

TEST_CASE("bisection") {
    CHECK(tan_root(1) == doctest::Approx(2.028757838110434).epsilon(1e-14));
    CHECK(std::abs(bisect_root([](double x) { return x; }, -1.0, 1.0, 1e-15)) < 1e-15);
    CHECK(bisect_root([](double l) { return std::cos(std::sqrt(l)); }, 2.0, 3.0, 1e-13) ==
          doctest::Approx(pi * pi / 4).epsilon(1e-12));
    CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1; }, -1.0, 1.0, 1e-10), OracleError);
}

TEST_CASE("small explicit pencils") {
    for (auto m : {PencilMethod::Condensed, PencilMethod::DenseQZ}) {
        const auto ev = pencil_eigenvalues(laplacian3(), -1e9, 1e9, m);
        REQUIRE(ev.size() == 3);
        CHECK(ev[0] == doctest::Approx((2 - std::sqrt(2.0)) * 16).epsilon(1e-12));
        CHECK(ev[0] == doctest::Approx(9.3726).epsilon(1e-5));

        Pencil z = laplacian3();
        z.a_diag.setZero();
        z.a_off.setZero();
        const auto zeros = pencil_eigenvalues(z, -1.0, 1.0, m);
        REQUIRE(zeros.size() == 3);
        for (double v : zeros) CHECK(std::abs(v) < 1e-14);

        Pencil s = laplacian3();
        s.mass(1) = 0.0;
        CHECK(pencil_eigenvalues(s, -1e12, 1e12, m).size() == 2);
    }
}

TEST_CASE("condensed and dense solves agree") {
    const Problem pr = make_problem(0.0, 1.0, Regularity::Regular, "1 + x", "x", "indicator(0, 1/2)", 1.1);
    const auto cp = CharacteristicPair::automatic(pr, EntirePair::from_strings("lambda - 2", "-1"));
    const Pencil p = discretize(cp, 64);
    CHECK(p.size() == 65);
    const auto a = pencil_eigenvalues(p, -50, 2000, PencilMethod::Condensed);
    const auto b = pencil_eigenvalues(p, -50, 2000, PencilMethod::DenseQZ);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
}

TEST_CASE("eigenparameter condition: pencil against the transcendental roots") {
    const auto cp = sturmnev::testing::eigen_dependent_bc();
    const Pencil p = discretize(cp, 4096);
    CHECK_FALSE(p.companion);
    CHECK(p.mass(4096) == doctest::Approx(1.0 + 0.5 / 4096).epsilon(1e-15));
    const auto ev = pencil_eigenvalues(p, -1.0, 70.0);
    REQUIRE(ev.size() == 4);
    CHECK(std::abs(ev[0]) < 1e-3);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(ev[k] - std::pow(tan_root(k), 2)) < 1e-3);
}

TEST_CASE("second-order convergence") {
    const auto cp = sturmnev::testing::eigen_dependent_bc();
    const double t1 = std::pow(tan_root(1), 2);
    double prev = 0.0;
    for (int n : {64, 128, 256, 512}) {
        const double err = std::abs(pencil_eigenvalues(discretize(cp, n), 1.0, 10.0).at(0) - t1);
        if (prev > 0.0) {
            const double ratio = prev / err;
            CHECK(ratio >= 3.0);
            CHECK(ratio <= 5.0);
        }
        prev = err;
    }
}

TEST_CASE("Dirichlet pair and vanishing weight") {
    const Problem free = make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "1", pi / 2);
    const auto d = CharacteristicPair::automatic(free, EntirePair::from_strings("1", "0"));
    CHECK(std::abs(pencil_eigenvalues(discretize(d, 4096), 0.0, 5.0).at(0) - pi * pi / 4) < 1e-4);

    const Problem half = make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "indicator(0, 1/2)", pi / 2);
    const auto h = CharacteristicPair::automatic(half, EntirePair::from_strings("1", "0"));
    const Pencil p = discretize(h, 4096);
    const auto ev = pencil_eigenvalues(p, 0.0, 400.0);
    const double expected[] = {2.960695537579869, 46.93944731976536, 165.7552313902788, 363.23285683686095};
    REQUIRE(ev.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(ev[k] - expected[k]) < 1e-3);
}

TEST_CASE("rational condition uses a companion unknown") {
    // C1 depends on lambda: tau = 1 / (3 - lambda) has a pole at 3
    const Problem pr = make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "1", pi / 2);
    const auto cp = CharacteristicPair::automatic(pr, EntirePair::from_strings("-1", "3 - lambda"));
    const Pencil p = discretize(cp, 64);
    CHECK(p.companion);
    CHECK(p.size() == 66);
    const auto a = pencil_eigenvalues(p, -10, 500, PencilMethod::Condensed);
    const auto b = pencil_eigenvalues(p, -10, 500, PencilMethod::DenseQZ);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
}

TEST_CASE("scope and argument errors") {
    const Problem pr = make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "1", pi / 2);
    CHECK_THROWS_WITH_AS(discretize(CharacteristicPair::automatic(pr, EntirePair::from_strings("sin(lambda)", "-1")), 64),
                         doctest::Contains("oracle scope"), OracleError);
    CHECK_THROWS_AS(discretize(sturmnev::testing::eigen_dependent_bc(), 8), OracleError);
}

TEST_CASE("matching") {
    const auto r = match_eigenvalues({1.0, 2.0, 3.0}, {1.0001, 2.0002, 3.5}, 0.0, 4.0, 1e-3);
    CHECK(r.pairs.size() == 2);
    CHECK(r.unmatched_engine == std::vector<double>{3.0});
    CHECK(r.unmatched_oracle == std::vector<double>{3.5});
    CHECK_FALSE(r.ok(1e-3));
    CHECK(match_eigenvalues({1.0, 2.0}, {1.0, 2.0}, 0.0, 3.0, 1e-3).ok(1e-3));
}
