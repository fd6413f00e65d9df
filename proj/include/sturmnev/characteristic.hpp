#pragma once

#include "sturmnev/nevpair.hpp"
#include "sturmnev/problem.hpp"

#include <stdexcept>
#include <utility>

namespace sturmnev {

class PoleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WCoefficients {
    cplx w1 = 1.0, w2 = 0.0, w3 = 0.0, w4 = 1.0;
};

/// phi_B(., 0), psi_B(., 0) on [a, b'] and the transfer matrix they form at b'.
struct LambdaZeroSolutions {
    explicit LambdaZeroSolutions(const Problem& problem);
    Trajectory phi, psi;
    double phi_b, phi1_b, psi_b, psi1_b;  // values and quasi-derivatives at b'
};

/// Numerator and denominator of m = Phi / Psi.
struct PhiPsi {
    cplx phi, psi;
    double scale = 1.0;  // (|C0| + |C1|) times the size of the transfer data
};

/// Direct form: Phi = psi_B(b) C0 + psi_B^[1](b) C1, Psi = phi_B(b) C0 + phi_B^[1](b) C1,
/// with (C0, C1) acting on y(b), y^[1](b).
PhiPsi char_regular(const Problem& problem, const EntirePair& pair, cplx lambda);

WCoefficients w_coeffs(const Problem& problem, const LambdaZeroSolutions& zero, cplx lambda);
WCoefficients w_coeffs(const Problem& problem, cplx lambda);

/// Linear-fractional form with the pair acting on the singular boundary values.
PhiPsi apply_w(const WCoefficients& w, cplx c0, cplx c1);

/// Phi = w2 C0 + w4 C1, Psi = w1 C0 + w3 C1 with the pair of a Quasiregular
/// problem used as is; for a Regular problem the pair is first rewritten in
/// terms of the singular boundary values so both forms describe one problem.
PhiPsi char_quasiregular(const Problem& problem, const EntirePair& pair, cplx lambda);

class CharacteristicPair {
public:
    enum class Mode { RegularDirect, QuasiregularW };

    CharacteristicPair(Problem problem, EntirePair pair, Mode mode);

    /// RegularDirect when the interval is finite, QuasiregularW otherwise.
    static CharacteristicPair automatic(Problem problem, EntirePair pair);

    const Problem& problem() const { return problem_; }
    const EntirePair& pair() const { return pair_; }
    Mode mode() const { return mode_; }
    const LambdaZeroSolutions& lambda_zero() const { return zero_; }

    PhiPsi at(cplx lambda) const;
    cplx psi(cplx lambda) const;

    /// Phi / Psi; throws PoleError when |Psi| < 1e-13 (|Phi| + |Psi| + 1).
    cplx m(cplx lambda) const;

    /// Boundary values (G0 y, G1 y) at b' in the problem's convention.
    std::pair<cplx, cplx> boundary_values(cplx y_b, cplx quasi_b) const;

    /// C0 G0 y + C1 G1 y for the state (y, y^[1]) at b'.
    cplx boundary_defect(cplx lambda, cplx y_b, cplx quasi_b) const;

    /// Pair entries at lambda in the convention the route needs.
    std::pair<cplx, cplx> pair_for_regular(cplx lambda) const;
    std::pair<cplx, cplx> pair_for_singular(cplx lambda) const;

private:
    Problem problem_;
    EntirePair pair_;
    Mode mode_;
    LambdaZeroSolutions zero_;
};

cplx m_value(const CharacteristicPair& cp, cplx lambda);

}  // namespace sturmnev
