#include "doctest.h"
#include "sturmnev/expr.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sturmnev;
using Kind = Expr::Kind;

namespace {

Expr random_tree(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 9);
    switch (pick(rng)) {
    case 0: {
        // parsed literals are non-negative; keep a spread of magnitudes
        std::uniform_real_distribution<double> mant(0.0, 10.0);
        std::uniform_int_distribution<int> ex(-12, 12);
        return Expr::number(mant(rng) * std::pow(10.0, ex(rng)));
    }
    case 1: return Expr::x();
    case 2: return Expr::lambda();
    case 3: return Expr::pi();
    case 4: return Expr::neg(random_tree(rng, depth - 1));
    case 5: {
        std::uniform_int_distribution<int> f(0, 5);
        return Expr::call(static_cast<Func>(f(rng)), random_tree(rng, depth - 1));
    }
    case 6: {
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        const double lo = u(rng);
        return Expr::indicator(lo, lo + 0.001 + std::abs(u(rng)));
    }
    default: {
        std::uniform_int_distribution<int> op(static_cast<int>(Kind::Add), static_cast<int>(Kind::Pow));
        return Expr::binary(static_cast<Kind>(op(rng)), random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    }
    }
}

std::size_t error_offset(const char* src, Slot slot = Slot::Any) {
    try {
        Expr::parse(src, slot);
    } catch (const ParseError& e) {
        return e.offset();
    }
    return std::size_t(-1);
}

}  // namespace

TEST_CASE("printing then parsing reproduces random trees") {
    std::mt19937 rng(20240611);
    for (int i = 0; i < 1000; ++i) {
        const Expr e = random_tree(rng, 6);
        const std::string s = e.to_string();
        const Expr back = Expr::parse(s);
        CHECK_MESSAGE(back == e, s);
        CHECK(back.to_string() == s);
    }
}

TEST_CASE("precedence and associativity") {
    CHECK(Expr::parse("1 + 2 * 3").eval_real(0) == 7.0);
    CHECK(Expr::parse("2 ^ 3 ^ 2").eval_real(0) == 512.0);
    CHECK(Expr::parse("-2 ^ 2").eval_real(0) == -4.0);
    CHECK(Expr::parse("2 ^ -1").eval_real(0) == 0.5);
    CHECK(Expr::parse("8 / 4 / 2").eval_real(0) == 1.0);
    CHECK(Expr::parse("1 - 2 - 3").eval_real(0) == -4.0);
    CHECK(Expr::parse("2 * pi").eval_real(0) == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(Expr::parse("1.5e-3 * 2").eval_real(0) == doctest::Approx(3e-3));
    CHECK(Expr::parse("exp(x) + sqrt(x) - abs(-x)").eval_real(4.0) == doctest::Approx(std::exp(4.0) + 2.0 - 4.0));
}

TEST_CASE("indicator is one on the closed interval") {
    const Expr e = Expr::parse("indicator(0, 1/2)", Slot::Coefficient);
    CHECK(e.eval_real(0.0) == 1.0);
    CHECK(e.eval_real(0.5) == 1.0);
    CHECK(e.eval_real(0.25) == 1.0);
    CHECK(e.eval_real(0.5000001) == 0.0);
    CHECK(e.eval_real(-1e-12) == 0.0);
    CHECK(e.breakpoints() == std::vector<double>{0.0, 0.5});
    CHECK(Expr::parse("indicator(0,1)+indicator(1,2)").breakpoints() == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("parse errors carry offsets") {
    CHECK(error_offset("1 + foo") == 4);
    CHECK(error_offset("(1 + 2") == 6);
    CHECK(error_offset("") == 0);
    CHECK(error_offset("1 +") == 3);
    CHECK(error_offset("2 * * 3") == 4);
    CHECK(error_offset("indicator(1, 0)") == 0);
    CHECK(error_offset("indicator(x, 1)") != std::size_t(-1));
    CHECK(error_offset("1 2") == 2);
}

TEST_CASE("slot rules") {
    CHECK_THROWS_WITH_AS(Expr::parse("lambda * x", Slot::Coefficient), doctest::Contains("lambda not allowed here"),
                         ParseError);
    CHECK_THROWS_WITH_AS(Expr::parse("x + lambda", Slot::Pair), doctest::Contains("x not allowed here"), ParseError);
    CHECK_THROWS_AS(Expr::parse("indicator(0, 1)", Slot::Pair), ParseError);
    CHECK_NOTHROW(Expr::parse("lambda^2 - 1", Slot::Pair));
    CHECK_NOTHROW(Expr::parse("exp(-x) * (1 + x^2)", Slot::Coefficient));
}

TEST_CASE("real evaluation reports domain errors") {
    CHECK_THROWS_AS(Expr::parse("1 / x").eval_real(0.0), EvalError);
    CHECK_THROWS_AS(Expr::parse("sqrt(x)").eval_real(-1.0), EvalError);
    CHECK_THROWS_AS(Expr::parse("exp(x)").eval_real(1e6), EvalError);
    CHECK_THROWS_AS(Expr::parse("lambda").eval_real(0.0), EvalError);
}

TEST_CASE("complex evaluation in lambda") {
    const std::complex<double> l(1.5, -2.0);
    CHECK(std::abs(Expr::parse("lambda^3 - 2*lambda").eval_complex(l) - (l * l * l - 2.0 * l)) < 1e-13);
    CHECK(std::abs(Expr::parse("cos(lambda) * exp(lambda)").eval_complex(l) - std::cos(l) * std::exp(l)) < 1e-13);
    CHECK_THROWS_AS(Expr::parse("x").eval_complex(l), EvalError);
}

TEST_CASE("non-entire constructs are flagged") {
    CHECK_FALSE(Expr::parse("lambda^2 + 3*lambda - 1").maybe_non_entire());
    CHECK_FALSE(Expr::parse("sin(lambda) / 2").maybe_non_entire());
    CHECK_FALSE(Expr::parse("sqrt(2) * lambda").maybe_non_entire());
    CHECK(Expr::parse("1 / lambda").maybe_non_entire());
    CHECK(Expr::parse("sqrt(lambda)").maybe_non_entire());
    CHECK(Expr::parse("abs(lambda)").maybe_non_entire());
    CHECK(Expr::parse("lambda ^ 0.5").maybe_non_entire());
    CHECK(Expr::parse("tan(lambda)").maybe_non_entire());
}
