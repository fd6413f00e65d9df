#include "sturmnev/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace sturmnev {

namespace {

using cplx = std::complex<double>;

struct Panel {
    double lo, hi;
    cplx value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const ComplexIntegrand& f, double lo, double hi) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& nodes = kronrod::abscissa();
    const auto& kw = kronrod::weights();
    const auto& gw = gauss::weights();

    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    cplx fc = f(c);
    cplx k = fc * kw[0];
    cplx g = fc * gw[0];
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const cplx s = f(c + h * nodes[i]) + f(c - h * nodes[i]);
        k += s * kw[i];
        if (i % 2 == 0) g += s * gw[i / 2];
    }
    return Panel{lo, hi, k * h, std::abs((k - g) * h)};
}

}  // namespace

QuadratureResult integrate_panels(const ComplexIntegrand& f, std::span<const double> knots,
                                  const QuadratureOptions& opts) {
    if (knots.size() < 2) throw QuadratureError("integrate_panels: need at least two knots");

    std::priority_queue<Panel> heap;
    cplx total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i + 1] > knots[i])) continue;
        Panel p = gk15(f, knots[i], knots[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }

    int subdivisions = 0;
    double exhausted = 0.0;
    while (!heap.empty() && err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (subdivisions >= opts.max_subdivisions) {
            throw QuadratureError("quadrature did not converge after " + std::to_string(subdivisions) +
                                  " subdivisions (error estimate " + std::to_string(err) + ")");
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // panel exhausted at machine resolution; accept its estimate
            err -= worst.error;
            exhausted += worst.error;
            continue;
        }
        Panel left = gk15(f, worst.lo, mid);
        Panel right = gk15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    const int panels = static_cast<int>(heap.size());
    err = exhausted;
    for (; !heap.empty(); heap.pop()) err += heap.top().error;
    return QuadratureResult{total, err, panels};
}

}  // namespace sturmnev
