#pragma once

#include "sturmnev/characteristic.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sturmnev {

class SpectrumError : public std::runtime_error {
public:
    enum class Kind { CountMismatch, NonSimpleZero, NegativeResidue, NotReal };
    SpectrumError(Kind kind, const std::string& message, int scan_count = -1, int contour_count = -1);
    Kind kind() const noexcept { return kind_; }
    int scan_count() const noexcept { return scan_count_; }
    int contour_count() const noexcept { return contour_count_; }

private:
    Kind kind_;
    int scan_count_, contour_count_;
};

/// One real pole t of m, with xi = -res_t m > 0.
struct Eigenvalue {
    double t = 0.0;
    double residue_xi = 0.0;
    double psi_deriv = 0.0;           // Psi'(t), complex-step
    double multiplicity_check = 0.0;  // |Psi'(t)| max(1, |t|) / scale
    double central_diff_gap = 0.0;    // relative gap to a central difference of Psi
    double boundary_defect = 0.0;     // scaled C0 G0 phi + C1 G1 phi at t
    double phi_value = 0.0;           // Phi(t)
};

struct DiscreteSpectralFunction {
    std::vector<Eigenvalue> eigenvalues;  // strictly increasing t
    double lo = 0.0, hi = 0.0;
    int scan_points = 0;
    int contour_count = -1;               // -1 when the contour check was skipped
    std::vector<double> spurious;         // common zeros of Phi and Psi, excluded
};

struct SpectrumOptions {
    double root_tol = 1e-10;       // |t error| <= root_tol * max(1, |t|)
    double tangent_tol = 1e-8;     // |Psi| local minima below this (relative) are inspected
    double simple_tol = 1e-10;     // multiplicity_check below this: non-simple zero
    double common_zero_tol = 1e-10;
    double residue_tol = 1e-9;
    bool verify_count = true;
    unsigned threads = 0;          // 0: hardware concurrency
    int max_refinements = 10;
};

/// Integral of sqrt(weight / p) over [a, b']; sets the eigenvalue spacing scale.
double oscillation_length(const Problem& problem);

DiscreteSpectralFunction find_eigenvalues(const CharacteristicPair& cp, double lo, double hi,
                                          const SpectrumOptions& opts = {});

Eigenvalue residue_at(const CharacteristicPair& cp, double t, const SpectrumOptions& opts = {});

/// Number of zeros of Psi inside the rectangle [xl, xr] x [-height, height],
/// by continuous tracking of arg Psi (uses Psi(conj l) = conj Psi(l)).
int argument_count(const CharacteristicPair& cp, double xl, double xr, double height, unsigned threads = 0);

}  // namespace sturmnev
