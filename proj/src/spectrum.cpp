#include "sturmnev/spectrum.hpp"

#include "sturmnev/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sturmnev {

SpectrumError::SpectrumError(Kind kind, const std::string& message, int scan_count, int contour_count)
    : std::runtime_error(message), kind_(kind), scan_count_(scan_count), contour_count_(contour_count) {}

double oscillation_length(const Problem& problem) {
    const auto& c = problem.coeffs();
    const std::vector<double> knots = problem.knots(problem.truncation());
    auto f = [&c](double x) -> cplx {
        const double w = c.weight(x);
        return w > 0.0 ? std::sqrt(w / c.p(x)) : 0.0;
    };
    QuadratureOptions q = problem.quadrature();
    q.rel_tol = std::max(q.rel_tol, 1e-8);
    return integrate_panels(f, knots, q).value.real();
}

namespace {

constexpr double pi = std::numbers::pi;

double spacing(double length, double t) {
    return std::max((pi / length) * (pi / length), 2.0 * pi * std::sqrt(std::abs(t)) / length) / 4.0;
}

double psi_real(const CharacteristicPair& cp, double t) { return cp.psi(cplx(t)).real(); }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

struct RawRoot {
    Eigenvalue ev;
    double scale = 1.0;
};

RawRoot evaluate_root(const CharacteristicPair& cp, double t, double length) {
    RawRoot r;
    Eigenvalue& e = r.ev;
    e.t = t;
    const PhiPsi v = cp.at(cplx(t));
    r.scale = std::max(v.scale, std::numeric_limits<double>::min());
    e.phi_value = v.phi.real();

    const double h = 1e-8 * std::max(1.0, std::abs(t));
    e.psi_deriv = cp.psi(cplx(t, h)).imag() / h;
    // five-point stencil on the local oscillation scale
    const double d = 5e-3 * spacing(length, t);
    const double central = (psi_real(cp, t - 2 * d) - 8.0 * psi_real(cp, t - d) + 8.0 * psi_real(cp, t + d) -
                            psi_real(cp, t + 2 * d)) /
                           (12.0 * d);
    e.central_diff_gap = std::abs(central - e.psi_deriv) / std::max(std::abs(e.psi_deriv), 1e-300);
    e.multiplicity_check = std::abs(e.psi_deriv) * std::max(1.0, std::abs(t)) / r.scale;
    e.residue_xi = e.psi_deriv != 0.0 ? -e.phi_value / e.psi_deriv : std::numeric_limits<double>::infinity();

    const Problem& p = cp.problem();
    const double s = std::sin(p.left_angle()), c = std::cos(p.left_angle());
    const Trajectory phi = integrate(p, cplx(t), s, -c, p.truncation());
    const auto& yb = phi.final_state();
    const auto [g0, g1] = cp.boundary_values(yb[0], yb[1]);
    const cplx c0 = cp.pair().c0(cplx(t)), c1 = cp.pair().c1(cplx(t));
    const double bscale = (std::abs(c0) + std::abs(c1)) * (std::abs(g0) + std::abs(g1));
    e.boundary_defect = bscale > 0.0 ? std::abs(c0 * g0 + c1 * g1) / bscale : 0.0;
    return r;
}

void check_root(const RawRoot& r, const SpectrumOptions& opts) {
    char buf[160];
    if (r.ev.multiplicity_check < opts.simple_tol) {
        std::snprintf(buf, sizeof buf, "non-simple zero of Psi at t = %.17g (|Psi'| scaled = %.3g)", r.ev.t,
                      r.ev.multiplicity_check);
        throw SpectrumError(SpectrumError::Kind::NonSimpleZero, buf);
    }
    if (!(r.ev.residue_xi > 0.0)) {
        std::snprintf(buf, sizeof buf, "residue xi = %.6g <= 0 at t = %.17g: the pair is not Nevanlinna",
                      r.ev.residue_xi, r.ev.t);
        throw SpectrumError(SpectrumError::Kind::NegativeResidue, buf);
    }
}

bool is_common_zero(const RawRoot& r, const SpectrumOptions& opts) {
    return std::abs(r.ev.phi_value) < opts.common_zero_tol * r.scale;
}

struct Scan {
    std::vector<double> t;
    std::vector<double> v;
};

int root_count(const Scan& s) {
    int n = 0;
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        if (s.v[i] == 0.0) ++n;
        if (i + 1 < s.v.size() && sign(s.v[i]) * sign(s.v[i + 1]) < 0) ++n;
    }
    return n;
}

Scan refine(const CharacteristicPair& cp, const Scan& s, unsigned threads) {
    const std::size_t n = s.t.size();
    const auto mids = parallel_map(
        n - 1, [&](std::size_t i) { return psi_real(cp, 0.5 * (s.t[i] + s.t[i + 1])); }, threads);
    Scan out;
    out.t.reserve(2 * n - 1);
    out.v.reserve(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.t.push_back(s.t[i]);
        out.v.push_back(s.v[i]);
        if (i + 1 < n) {
            out.t.push_back(0.5 * (s.t[i] + s.t[i + 1]));
            out.v.push_back(mids[i]);
        }
    }
    return out;
}

double toms748_root(const CharacteristicPair& cp, double a, double b, double fa, double fb, double tol) {
    auto f = [&cp](double t) { return psi_real(cp, t); };
    auto done = [tol](double x, double y) { return std::abs(y - x) <= tol * std::max(1.0, std::abs(x)); };
    std::uintmax_t iters = 200;
    const auto [l, r] = boost::math::tools::toms748_solve(f, a, b, fa, fb, done, iters);
    return 0.5 * (l + r);
}

}  // namespace

Eigenvalue residue_at(const CharacteristicPair& cp, double t, const SpectrumOptions& opts) {
    const RawRoot r = evaluate_root(cp, t, std::max(oscillation_length(cp.problem()), 1e-6));
    check_root(r, opts);
    return r.ev;
}

int argument_count(const CharacteristicPair& cp, double xl, double xr, double height, unsigned threads) {
    // upper half of the counter-clockwise rectangle; the lower half mirrors it
    const cplx corners[4] = {cplx(xr, 0.0), cplx(xr, height), cplx(xl, height), cplx(xl, 0.0)};
    const int counts[3] = {16, 64 + 8 * static_cast<int>(std::ceil((xr - xl) / height)), 16};
    std::vector<double> s;  // path parameter: segment k covers [k, k + 1]
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < counts[k]; ++j) s.push_back(k + static_cast<double>(j) / counts[k]);
    s.push_back(3.0);
    auto point = [&](double u) {
        const int k = std::min(2, static_cast<int>(u));
        return corners[k] + (u - k) * (corners[k + 1] - corners[k]);
    };
    auto eval = [&](double u) { return cp.psi(point(u)); };
    std::vector<cplx> v = parallel_map(s.size(), [&](std::size_t i) { return eval(s[i]); }, threads);

    constexpr double max_step = pi / 4.0;
    for (int level = 0; level < 60; ++level) {
        std::vector<std::size_t> coarse;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            if (v[i] == cplx(0.0) || v[i + 1] == cplx(0.0))
                throw SpectrumError(SpectrumError::Kind::CountMismatch, "Psi vanishes on the counting contour");
            if (std::abs(std::arg(v[i + 1] / v[i])) > max_step && s[i + 1] - s[i] > 1e-15) coarse.push_back(i);
        }
        if (coarse.empty()) break;
        const auto mids = parallel_map(
            coarse.size(), [&](std::size_t j) { return eval(0.5 * (s[coarse[j]] + s[coarse[j] + 1])); }, threads);
        std::vector<double> s2;
        std::vector<cplx> v2;
        s2.reserve(s.size() + coarse.size());
        v2.reserve(s.size() + coarse.size());
        std::size_t j = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            s2.push_back(s[i]);
            v2.push_back(v[i]);
            if (j < coarse.size() && coarse[j] == i) {
                s2.push_back(0.5 * (s[i] + s[i + 1]));
                v2.push_back(mids[j]);
                ++j;
            }
        }
        s.swap(s2);
        v.swap(v2);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) total += std::arg(v[i + 1] / v[i]);
    return static_cast<int>(std::lround(2.0 * total / (2.0 * pi)));
}

DiscreteSpectralFunction find_eigenvalues(const CharacteristicPair& cp, double lo, double hi,
                                          const SpectrumOptions& opts) {
    if (!(hi > lo)) throw std::invalid_argument("spectrum window needs lo < hi");
    DiscreteSpectralFunction out;
    out.lo = lo;
    out.hi = hi;
    const double length = std::max(oscillation_length(cp.problem()), 1e-6);

    std::vector<double> grid;
    for (double t = lo; t < hi;) {
        grid.push_back(t);
        const double h0 = spacing(length, t);
        t += spacing(length, std::max(std::abs(t), std::abs(t + h0)));
    }
    if (grid.size() > 1 && hi - grid.back() < 0.25 * spacing(length, hi)) grid.pop_back();
    grid.push_back(hi);

    Scan scan{grid, parallel_map(grid.size(), [&](std::size_t i) { return psi_real(cp, grid[i]); }, opts.threads)};
    std::vector<int> history{root_count(scan)};
    for (int level = 0; level < opts.max_refinements; ++level) {
        scan = refine(cp, scan, opts.threads);
        history.push_back(root_count(scan));
        const std::size_t n = history.size();
        if (n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3]) break;
    }
    out.scan_points = static_cast<int>(scan.t.size());

    struct Bracket {
        double a, b, fa, fb;
    };
    std::vector<Bracket> brackets;
    std::vector<double> exact;
    const auto& t = scan.t;
    const auto& v = scan.v;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (v[i] == 0.0) exact.push_back(t[i]);
        if (i + 1 < t.size() && sign(v[i]) * sign(v[i + 1]) < 0) brackets.push_back({t[i], t[i + 1], v[i], v[i + 1]});
    }

    // local minima of |Psi| without a sign change: hidden root pairs or tangential zeros
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (sign(v[i - 1]) != sign(v[i]) || sign(v[i]) != sign(v[i + 1]) || v[i] == 0.0) continue;
        if (!(std::abs(v[i]) < std::abs(v[i - 1]) && std::abs(v[i]) < std::abs(v[i + 1]))) continue;
        auto mag = [&](double u) { return std::abs(psi_real(cp, u)); };
        const auto [tm, fm] = boost::math::tools::brent_find_minima(mag, t[i - 1], t[i + 1], 40);
        const double local = std::max(std::abs(v[i - 1]), std::abs(v[i + 1]));
        if (!(fm < opts.tangent_tol * local)) continue;
        const double vm = psi_real(cp, tm);
        if (sign(vm) == -sign(v[i])) {
            brackets.push_back({t[i - 1], tm, v[i - 1], vm});
            brackets.push_back({tm, t[i + 1], vm, v[i + 1]});
            continue;
        }
        const PhiPsi at = cp.at(cplx(tm));
        if (std::abs(vm) < opts.simple_tol * at.scale) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "tangential (non-simple) zero of Psi near t = %.17g", tm);
            throw SpectrumError(SpectrumError::Kind::NonSimpleZero, buf);
        }
    }

    std::vector<double> roots = parallel_map(
        brackets.size(),
        [&](std::size_t j) {
            const Bracket& br = brackets[j];
            return toms748_root(cp, br.a, br.b, br.fa, br.fb, opts.root_tol);
        },
        opts.threads);
    roots.insert(roots.end(), exact.begin(), exact.end());
    std::sort(roots.begin(), roots.end());

    const auto raw = parallel_map(roots.size(), [&](std::size_t j) { return evaluate_root(cp, roots[j], length); }, opts.threads);
    for (const RawRoot& r : raw) {
        if (is_common_zero(r, opts)) {
            out.spurious.push_back(r.ev.t);
            continue;
        }
        check_root(r, opts);
        out.eigenvalues.push_back(r.ev);
    }

    if (opts.verify_count) {
        // keep the vertical sides of the contour clear of zeros of Psi
        auto place = [&](double edge, double inward) {
            const double gap = 1e-3 * spacing(length, edge);
            for (int k = 0; k < 20; ++k) {
                bool near = std::abs(psi_real(cp, edge)) < 1e-8 * cp.at(cplx(edge)).scale;
                for (double r : roots) near = near || std::abs(r - edge) < gap;
                if (!near) break;
                edge += inward * gap;
            }
            return edge;
        };
        const double xl = place(lo, 1.0), xr = place(hi, -1.0);
        const double height = 0.5 * spacing(length, std::max(std::abs(lo), std::abs(hi)));
        out.contour_count = argument_count(cp, xl, xr, height, opts.threads);
        int expected = 0;
        for (double r : roots)
            if (r > xl && r < xr) ++expected;
        if (out.contour_count != expected) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "eigenvalue count mismatch on [%.6g, %.6g]: scan found %d, argument principle gives %d",
                          xl, xr, expected, out.contour_count);
            throw SpectrumError(SpectrumError::Kind::CountMismatch, buf, expected, out.contour_count);
        }
    }
    return out;
}

}  // namespace sturmnev
