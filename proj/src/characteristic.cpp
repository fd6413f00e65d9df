#include "sturmnev/characteristic.hpp"

#include <cmath>

namespace sturmnev {

LambdaZeroSolutions::LambdaZeroSolutions(const Problem& problem)
    : phi(integrate(problem, 0.0, std::sin(problem.left_angle()), -std::cos(problem.left_angle()),
                    problem.truncation())),
      psi(integrate(problem, 0.0, std::cos(problem.left_angle()), std::sin(problem.left_angle()),
                    problem.truncation())) {
    phi_b = phi.final_state()[0].real();
    phi1_b = phi.final_state()[1].real();
    psi_b = psi.final_state()[0].real();
    psi1_b = psi.final_state()[1].real();
}

namespace {

// (C0, C1) on (y(b), y^[1](b))  ->  the same condition on (G0b y, G1b y).
std::pair<cplx, cplx> regular_to_singular(const LambdaZeroSolutions& z, cplx c0, cplx c1) {
    return {c0 * z.phi_b + c1 * z.phi1_b, c0 * z.psi_b + c1 * z.psi1_b};
}

std::pair<cplx, cplx> singular_to_regular(const LambdaZeroSolutions& z, cplx c0, cplx c1) {
    return {c0 * z.psi1_b - c1 * z.phi1_b, -c0 * z.psi_b + c1 * z.phi_b};
}

cplx weighted(const Problem& problem, const Trajectory& u, const Trajectory& v) {
    // v is a lambda = 0 solution and therefore real; inner_delta's conjugate is harmless
    return inner_delta(problem, u, v);
}

}  // namespace

PhiPsi char_regular(const Problem& problem, const EntirePair& pair, cplx lambda) {
    if (problem.infinite()) throw ProblemError("char_regular needs a finite right endpoint");
    cplx c0 = pair.c0(lambda), c1 = pair.c1(lambda);
    if (problem.regularity() == Regularity::Quasiregular)
        std::tie(c0, c1) = singular_to_regular(LambdaZeroSolutions(problem), c0, c1);
    const auto [phi, psi] = phi_psi(problem, lambda);
    const auto& f = phi.final_state();
    const auto& g = psi.final_state();
    return {g[0] * c0 + g[1] * c1, f[0] * c0 + f[1] * c1};
}

WCoefficients w_coeffs(const Problem& problem, const LambdaZeroSolutions& zero, cplx lambda) {
    if (lambda == cplx(0.0)) return {};
    const auto [phi, psi] = phi_psi(problem, lambda);
    WCoefficients w;
    w.w1 = 1.0 + lambda * weighted(problem, phi, zero.psi);
    w.w2 = lambda * weighted(problem, psi, zero.psi);
    w.w3 = -lambda * weighted(problem, phi, zero.phi);
    w.w4 = 1.0 - lambda * weighted(problem, psi, zero.phi);
    return w;
}

WCoefficients w_coeffs(const Problem& problem, cplx lambda) {
    return w_coeffs(problem, LambdaZeroSolutions(problem), lambda);
}

PhiPsi apply_w(const WCoefficients& w, cplx c0, cplx c1) {
    return {w.w2 * c0 + w.w4 * c1, w.w1 * c0 + w.w3 * c1};
}

PhiPsi char_quasiregular(const Problem& problem, const EntirePair& pair, cplx lambda) {
    const LambdaZeroSolutions zero(problem);
    cplx c0 = pair.c0(lambda), c1 = pair.c1(lambda);
    if (problem.regularity() == Regularity::Regular) std::tie(c0, c1) = regular_to_singular(zero, c0, c1);
    return apply_w(w_coeffs(problem, zero, lambda), c0, c1);
}

CharacteristicPair::CharacteristicPair(Problem problem, EntirePair pair, Mode mode)
    : problem_(std::move(problem)), pair_(std::move(pair)), mode_(mode), zero_(problem_) {
    if (mode_ == Mode::RegularDirect && problem_.infinite())
        throw ProblemError("the direct characteristic form needs a finite right endpoint");
}

CharacteristicPair CharacteristicPair::automatic(Problem problem, EntirePair pair) {
    const Mode mode = problem.infinite() ? Mode::QuasiregularW : Mode::RegularDirect;
    return CharacteristicPair(std::move(problem), std::move(pair), mode);
}

std::pair<cplx, cplx> CharacteristicPair::pair_for_regular(cplx lambda) const {
    const cplx c0 = pair_.c0(lambda), c1 = pair_.c1(lambda);
    if (problem_.regularity() == Regularity::Regular) return {c0, c1};
    return singular_to_regular(zero_, c0, c1);
}

std::pair<cplx, cplx> CharacteristicPair::pair_for_singular(cplx lambda) const {
    const cplx c0 = pair_.c0(lambda), c1 = pair_.c1(lambda);
    if (problem_.regularity() == Regularity::Quasiregular) return {c0, c1};
    return regular_to_singular(zero_, c0, c1);
}

PhiPsi CharacteristicPair::at(cplx lambda) const {
    if (mode_ == Mode::RegularDirect) {
        const auto [c0, c1] = pair_for_regular(lambda);
        const auto [phi, psi] = phi_psi(problem_, lambda);
        const auto& f = phi.final_state();
        const auto& g = psi.final_state();
        const double size = std::abs(f[0]) + std::abs(f[1]) + std::abs(g[0]) + std::abs(g[1]);
        return {g[0] * c0 + g[1] * c1, f[0] * c0 + f[1] * c1, (std::abs(c0) + std::abs(c1)) * size};
    }
    const auto [c0, c1] = pair_for_singular(lambda);
    const WCoefficients w = w_coeffs(problem_, zero_, lambda);
    PhiPsi out = apply_w(w, c0, c1);
    out.scale = (std::abs(c0) + std::abs(c1)) *
                (std::abs(w.w1) + std::abs(w.w2) + std::abs(w.w3) + std::abs(w.w4));
    return out;
}

cplx CharacteristicPair::psi(cplx lambda) const {
    const double s = std::sin(problem_.left_angle()), c = std::cos(problem_.left_angle());
    if (mode_ == Mode::RegularDirect) {
        const auto [c0, c1] = pair_for_regular(lambda);
        const Trajectory phi = integrate(problem_, lambda, s, -c, problem_.truncation());
        const auto& f = phi.final_state();
        return f[0] * c0 + f[1] * c1;
    }
    const auto [c0, c1] = pair_for_singular(lambda);
    if (lambda == cplx(0.0)) return c0;
    const Trajectory phi = integrate(problem_, lambda, s, -c, problem_.truncation());
    const cplx w1 = 1.0 + lambda * weighted(problem_, phi, zero_.psi);
    const cplx w3 = -lambda * weighted(problem_, phi, zero_.phi);
    return w1 * c0 + w3 * c1;
}

cplx CharacteristicPair::m(cplx lambda) const {
    const PhiPsi v = at(lambda);
    const double scale = std::abs(v.phi) + std::abs(v.psi) + 1.0;
    if (std::abs(v.psi) < 1e-13 * scale) throw PoleError("m: lambda is numerically at a pole");
    return v.phi / v.psi;
}

std::pair<cplx, cplx> CharacteristicPair::boundary_values(cplx y_b, cplx quasi_b) const {
    if (problem_.regularity() == Regularity::Regular) return {y_b, quasi_b};
    return {zero_.psi1_b * y_b - zero_.psi_b * quasi_b, -zero_.phi1_b * y_b + zero_.phi_b * quasi_b};
}

cplx CharacteristicPair::boundary_defect(cplx lambda, cplx y_b, cplx quasi_b) const {
    const auto [g0, g1] = boundary_values(y_b, quasi_b);
    return pair_.c0(lambda) * g0 + pair_.c1(lambda) * g1;
}

cplx m_value(const CharacteristicPair& cp, cplx lambda) { return cp.m(lambda); }

}  // namespace sturmnev
