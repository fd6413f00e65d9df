#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>

namespace sturmnev {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_subdivisions = 200000;
};

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;
    int panels = 0;
};

using ComplexIntegrand = std::function<std::complex<double>(double)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature over the panels
/// delimited by `knots` (sorted, at least two entries, first/last are the
/// integration limits). The integrand is never sampled at a knot, so
/// jump discontinuities placed on knots cost nothing.
QuadratureResult integrate_panels(const ComplexIntegrand& f, std::span<const double> knots,
                                  const QuadratureOptions& opts = {});

}  // namespace sturmnev
