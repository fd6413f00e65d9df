#include "sturmnev/oracle.hpp"

#include <boost/math/tools/roots.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace sturmnev {

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(flo * fhi < 0.0)) throw OracleError("bisect_root: no sign change on the bracket");
    std::uintmax_t iters = 2000;
    auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto [a, b] = boost::math::tools::bisect(f, lo, hi, done, iters);
    return 0.5 * (a + b);
}

AffinePair affine_pair(const CharacteristicPair& cp) {
    auto c = [&cp](cplx l) { return cp.pair_for_regular(l); };
    const auto [m0, m1] = c(0.0);
    const auto [d0, d1] = c(1.0);
    const cplx n0 = m0 - d0, n1 = m1 - d1;
    const double size = std::abs(m0) + std::abs(m1) + std::abs(n0) + std::abs(n1);
    for (cplx l : {cplx(-3.3), cplx(2.7), cplx(0.0, 5.0), cplx(10.0, 2.0), cplx(-40.0, 0.5)}) {
        const auto [c0, c1] = c(l);
        const double err = std::abs(c0 - (m0 - l * n0)) + std::abs(c1 - (m1 - l * n1));
        if (!(err <= 1e-10 * size * (1.0 + std::abs(l))))
            throw OracleError("oracle scope: the boundary pair is not affine in lambda");
    }
    if (std::abs(m0.imag()) + std::abs(m1.imag()) + std::abs(n0.imag()) + std::abs(n1.imag()) > 1e-12 * size)
        throw OracleError("oracle scope: the boundary pair is not real");
    return {m0.real(), n0.real(), m1.real(), n1.real()};
}

Eigen::MatrixXd Pencil::dense_a() const {
    const Eigen::Index m = size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a.diagonal() = a_diag;
    for (Eigen::Index i = 0; i + 1 < m; ++i) a(i, i + 1) = a(i + 1, i) = a_off(i);
    return a;
}

Eigen::MatrixXd Pencil::dense_b() const { return mass.asDiagonal(); }

Pencil discretize(const CharacteristicPair& cp, int n) {
    if (n < 16) throw OracleError("discretize needs at least 16 grid intervals");
    const Problem& pr = cp.problem();
    const AffinePair bc = affine_pair(cp);
    const auto& c = pr.coeffs();
    const double a = pr.a(), b = pr.truncation(), h = (b - a) / n;
    auto x = [&](int i) { return i == n ? b : a + h * i; };

    const double bsize = std::abs(bc.m0) + std::abs(bc.n0) + std::abs(bc.m1) + std::abs(bc.n1);
    const bool right_dirichlet = std::abs(bc.m1) + std::abs(bc.n1) <= 1e-14 * bsize;
    const bool rational = !right_dirichlet && std::abs(bc.n1) > 1e-14 * bsize;
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
    if (rational) {
        alpha = -bc.n0 / bc.n1;
        delta = bc.m1 / bc.n1;
        gamma = (bc.n0 * bc.m1 - bc.m0 * bc.n1) / (bc.n1 * bc.n1);
        if (gamma < -1e-14 * (std::abs(alpha) + std::abs(delta) + 1.0))
            throw OracleError("boundary pair is not Nevanlinna: negative pole weight");
        if (gamma <= 1e-14 * (std::abs(alpha) + std::abs(delta) + 1.0)) gamma = 0.0;
    } else if (!right_dirichlet) {
        alpha = -bc.m0 / bc.m1;
        beta = bc.n0 / bc.m1;
        if (beta < 0.0) throw OracleError("boundary pair is not Nevanlinna: negative slope");
    }

    Pencil p;
    p.n = n;
    p.companion = gamma > 0.0;
    const Eigen::Index m = n + 1 + (p.companion ? 1 : 0);
    p.a_diag = Eigen::VectorXd::Zero(m);
    p.a_off = Eigen::VectorXd::Zero(m - 1);
    p.mass = Eigen::VectorXd::Zero(m);

    // coefficient samples stay off the nodes so jumps on nodes use one-sided values
    for (int i = 0; i < n; ++i) {
        const double flux = c.p(x(i) + 0.5 * h) / h;
        p.a_diag(i) += flux;
        p.a_diag(i + 1) += flux;
        p.a_off(i) = -flux;
        const double xl = x(i) + 0.25 * h, xr = x(i + 1) - 0.25 * h;
        p.a_diag(i) += 0.5 * h * c.q(xl);
        p.a_diag(i + 1) += 0.5 * h * c.q(xr);
        p.mass(i) += 0.5 * h * c.weight(xl);
        p.mass(i + 1) += 0.5 * h * c.weight(xr);
    }

    const double sb = std::sin(pr.left_angle()), cb = std::cos(pr.left_angle());
    if (std::abs(sb) < 1e-14) {
        p.a_diag(0) = 1.0;
        p.a_off(0) = 0.0;
        p.mass(0) = 0.0;
    } else {
        p.a_diag(0) -= cb / sb;
    }

    if (right_dirichlet) {
        p.a_diag(n) = 1.0;
        p.a_off(n - 1) = 0.0;
        p.mass(n) = 0.0;
    } else {
        p.a_diag(n) -= alpha;
        p.mass(n) += beta;
        if (p.companion) {
            p.a_off(n) = -std::sqrt(gamma);
            p.a_diag(n + 1) = delta;
            p.mass(n + 1) = 1.0;
        }
    }
    return p;
}

namespace {

// Solves the tridiagonal system T x = rhs in place (Thomas algorithm).
void thomas(std::vector<double> diag, const std::vector<double>& off, std::vector<double>& rhs) {
    const std::size_t m = diag.size();
    double scale = 0.0;
    for (double d : diag) scale = std::max(scale, std::abs(d));
    for (double o : off) scale = std::max(scale, std::abs(o));
    for (std::size_t i = 1; i < m; ++i) {
        if (!(std::abs(diag[i - 1]) > 1e-14 * scale)) throw OracleError("numerically singular pencil");
        const double w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (!(std::abs(diag[m - 1]) > 1e-14 * scale)) throw OracleError("numerically singular pencil");
    rhs[m - 1] /= diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

std::vector<double> condensed(const Pencil& p, double lo, double hi) {
    const Eigen::Index m = p.size();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i)
        if (p.mass(i) > 0.0) keep.push_back(i);
    if (keep.empty()) return {};
    const std::size_t k = keep.size();
    std::vector<double> d(k), o(k > 0 ? k - 1 : 0, 0.0);
    for (std::size_t j = 0; j < k; ++j) d[j] = p.a_diag(keep[j]);

    // Schur complement of every maximal run of zero-mass unknowns
    std::size_t j = 0;  // number of kept indices before the current position
    for (Eigen::Index i = 0; i < m;) {
        if (p.mass(i) > 0.0) {
            if (j + 1 < k && keep[j + 1] == i + 1) o[j] = p.a_off(i);
            ++j;
            ++i;
            continue;
        }
        Eigen::Index e = i;
        while (e + 1 < m && !(p.mass(e + 1) > 0.0)) ++e;
        const std::size_t len = static_cast<std::size_t>(e - i + 1);
        std::vector<double> td(len), to(len > 0 ? len - 1 : 0);
        for (std::size_t r = 0; r < len; ++r) td[r] = p.a_diag(i + static_cast<Eigen::Index>(r));
        for (std::size_t r = 0; r + 1 < len; ++r) to[r] = p.a_off(i + static_cast<Eigen::Index>(r));
        const bool has_left = i > 0, has_right = e + 1 < m;
        const double cl = has_left ? p.a_off(i - 1) : 0.0;
        const double cr = has_right ? p.a_off(e) : 0.0;
        std::vector<double> xl(len, 0.0), xr(len, 0.0);
        xl.front() = 1.0;
        xr.back() = 1.0;
        thomas(td, to, xl);
        thomas(td, to, xr);
        // T^{-1}: (s,s) = xl[0], (e,e) = xr[len-1], (s,e) = xr[0]
        if (has_left) d[j - 1] -= cl * cl * xl.front();
        if (has_right) d[j] -= cr * cr * xr.back();
        if (has_left && has_right) o[j - 1] -= cl * cr * xr.front();
        i = e + 1;
    }

    Eigen::VectorXd diag(static_cast<Eigen::Index>(k));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(k > 0 ? k - 1 : 0));
    for (std::size_t r = 0; r < k; ++r) diag(static_cast<Eigen::Index>(r)) = d[r] / p.mass(keep[r]);
    for (std::size_t r = 0; r + 1 < k; ++r)
        sub(static_cast<Eigen::Index>(r)) = o[r] / std::sqrt(p.mass(keep[r]) * p.mass(keep[r + 1]));
    if (k == 1) return diag(0) >= lo && diag(0) <= hi ? std::vector<double>{diag(0)} : std::vector<double>{};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw OracleError("tridiagonal eigensolver did not converge");
    std::vector<double> out;
    for (Eigen::Index r = 0; r < es.eigenvalues().size(); ++r) {
        const double v = es.eigenvalues()(r);
        if (v >= lo && v <= hi) out.push_back(v);
    }
    return out;
}

std::vector<double> dense_qz(const Pencil& p, double lo, double hi) {
    const Eigen::MatrixXd a = p.dense_a(), b = p.dense_b();
    const double na = a.cwiseAbs().maxCoeff(), nb = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    const Eigen::Index m = a.rows();
    std::vector<double> alpha(m), beta(m);
    std::vector<bool> real(m, true);
    if (na == 0.0) {
        // RealQZ does not deflate an exactly zero A; the pencil is already diagonal
        for (Eigen::Index i = 0; i < m; ++i) {
            alpha[i] = 0.0;
            beta[i] = b(i, i);
        }
    } else {
        Eigen::RealQZ<Eigen::MatrixXd> qz(a, b, false);
        if (qz.info() != Eigen::Success) throw OracleError("QZ iteration did not converge");
        const auto& s = qz.matrixS();
        const auto& t = qz.matrixT();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i + 1 < m && s(i + 1, i) != 0.0) {  // 2x2 block: complex pair
                real[i] = real[i + 1] = false;
                ++i;
                continue;
            }
            alpha[i] = s(i, i);
            beta[i] = t(i, i);
        }
    }
    std::vector<double> out;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!real[i]) continue;
        if (std::abs(alpha[i]) <= 1e-13 * std::max(na, 1.0) && std::abs(beta[i]) <= 1e-13 * nb)
            throw OracleError("numerically defective pencil: alpha and beta both vanish");
        if (std::abs(beta[i]) <= 1e-13 * nb) continue;  // infinite eigenvalue
        const double l = alpha[i] / beta[i];
        if (l >= lo && l <= hi) out.push_back(l);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<double> pencil_eigenvalues(const Pencil& p, double lo, double hi, PencilMethod method) {
    if (p.a_diag.size() != p.mass.size() || p.a_off.size() + 1 != p.a_diag.size())
        throw OracleError("pencil arrays have inconsistent sizes");
    for (Eigen::Index i = 0; i < p.mass.size(); ++i)
        if (p.mass(i) < 0.0) throw OracleError("pencil mass must be nonnegative");
    return method == PencilMethod::Condensed ? condensed(p, lo, hi) : dense_qz(p, lo, hi);
}

MatchReport match_eigenvalues(const std::vector<double>& engine, const std::vector<double>& oracle, double lo,
                              double hi, double tol) {
    MatchReport r;
    std::vector<bool> used(oracle.size(), false);
    for (double e : engine) {
        std::size_t best = oracle.size();
        double gap = 0.0;
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            const double g = std::abs(oracle[i] - e);
            if (best == oracle.size() || g < gap) {
                best = i;
                gap = g;
            }
        }
        const bool edge = e - lo <= tol || hi - e <= tol;
        if (best == oracle.size() || used[best] || gap > tol) {
            if (!edge) r.unmatched_engine.push_back(e);
            continue;
        }
        used[best] = true;
        r.pairs.push_back({e, oracle[best], gap});
        r.max_gap = std::max(r.max_gap, gap);
    }
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        const double o = oracle[i];
        if (used[i] || o < lo || o > hi) continue;
        if (o - lo <= tol || hi - o <= tol) continue;
        r.unmatched_oracle.push_back(o);
    }
    return r;
}

}  // namespace sturmnev
