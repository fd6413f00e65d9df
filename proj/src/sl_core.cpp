#include "sturmnev/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sturmnev {

IntegrationError::IntegrationError(double x, const std::string& message)
    : std::runtime_error(message + " at x = " + std::to_string(x)), x_(x) {}

Coefficients::Coefficients(RealFunction p, RealFunction q, RealFunction weight, std::vector<double> breakpoints)
    : p_(std::move(p)), q_(std::move(q)), w_(std::move(weight)), breakpoints_(std::move(breakpoints)) {
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

Coefficients Coefficients::from_expressions(const Expr& p, const Expr& q, const Expr& weight) {
    for (const Expr* e : {&p, &q, &weight}) e->validate_for(Slot::Coefficient);
    std::vector<double> bp;
    for (const Expr* e : {&p, &q, &weight}) {
        auto b = e->breakpoints();
        bp.insert(bp.end(), b.begin(), b.end());
    }
    return Coefficients([p](double x) { return p.eval_real(x); }, [q](double x) { return q.eval_real(x); },
                        [weight](double x) { return weight.eval_real(x); }, std::move(bp));
}

CoefficientReport check_coefficients(const Coefficients& c, double a, double b, int samples_per_segment) {
    CoefficientReport r;
    r.min_weight = std::numeric_limits<double>::infinity();
    std::vector<double> knots{a};
    for (double k : c.breakpoints())
        if (k > a && k < b) knots.push_back(k);
    knots.push_back(b);

    auto note = [&r](const std::string& m) {
        if (r.messages.size() < 8) r.messages.push_back(m);
    };

    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double lo = knots[s], hi = knots[s + 1];
        const double cell = (hi - lo) / samples_per_segment;
        for (int i = 0; i < samples_per_segment; ++i) {
            const double x = lo + (i + 0.5) * cell;
            double p, q, w;
            try {
                p = c.p(x);
                q = c.q(x);
                w = c.weight(x);
            } catch (const std::exception& e) {
                r.finite = false;
                note(std::string("coefficient evaluation failed at x = ") + std::to_string(x) + ": " + e.what());
                continue;
            }
            if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(w) || p == 0.0 ||
                !std::isfinite(1.0 / p)) {
                r.finite = false;
                note("non-finite 1/p, q or weight at x = " + std::to_string(x));
                continue;
            }
            if (p < 0.0) {
                r.p_positive = false;
                note("p is not positive at x = " + std::to_string(x));
            }
            if (w < 0.0) {
                r.weight_nonnegative = false;
                note("weight is negative at x = " + std::to_string(x));
            }
            r.min_weight = std::min(r.min_weight, w);
            if (w > 0.0) r.positive_measure += cell;
        }
    }
    if (!(r.positive_measure > 0.0)) {
        r.weight_nontrivial = false;
        note("trivial weight: no subinterval with weight > 0 was found");
    }
    return r;
}

namespace {

using State = Trajectory::State;

// Dormand-Prince 5(4) with Hairer's dense output coefficients.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

State axpy(const State& y, std::initializer_list<std::pair<double, const State*>> terms, double h) {
    State r = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        r[0] += h * c * (*k)[0];
        r[1] += h * c * (*k)[1];
    }
    return r;
}

class System {
public:
    System(const Coefficients& c, cplx lambda) : c_(c), lambda_(lambda) {}

    // Coefficients are sampled strictly inside [lo, hi] so that one-sided
    // values are used at discontinuities sitting on knots.
    void set_segment(double lo, double hi) {
        lo_ = lo;
        hi_ = hi;
    }

    State operator()(double x, const State& y) const {
        if (x <= lo_) x = std::nextafter(lo_, hi_);
        if (x >= hi_) x = std::nextafter(hi_, lo_);
        const double p = c_.p(x);
        const double q = c_.q(x);
        const double w = c_.weight(x);
        if (!std::isfinite(p) || p == 0.0 || !std::isfinite(q) || !std::isfinite(w))
            throw IntegrationError(x, "non-finite coefficient sample");
        return State{y[1] / p, (q - lambda_ * w) * y[0]};
    }

private:
    const Coefficients& c_;
    cplx lambda_;
    double lo_ = -std::numeric_limits<double>::infinity();
    double hi_ = std::numeric_limits<double>::infinity();
};

double error_norm(const State& err, const State& y0, const State& y1, const IntegratorOptions& o) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = o.abs_tol + o.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / sk;
        s += r * r;
    }
    return std::sqrt(s / 2.0);
}

double initial_step(const System& f, double x, const State& y0, const State& f0, double hmax,
                    const IntegratorOptions& o) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = o.abs_tol + o.rel_tol * std::abs(y0[i]);
        dnf += std::norm(f0[i]) / (sk * sk);
        dny += std::norm(y0[i]) / (sk * sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    State y1 = axpy(y0, {{1.0, &f0}}, h);
    State f1 = f(x + h, y1);
    double der2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = o.abs_tol + o.rel_tol * std::abs(y0[i]);
        der2 += std::norm(f1[i] - f0[i]) / (sk * sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, hmax});
}

}  // namespace

Problem::Problem(double a, double b, Regularity regularity, Coefficients coeffs, double left_angle,
                 IntegratorOptions integrator, QuadratureOptions quadrature, TailPolicy tail,
                 std::vector<double> mesh_knots)
    : a_(a),
      b_(b),
      regularity_(regularity),
      coeffs_(std::move(coeffs)),
      left_angle_(left_angle),
      integrator_(integrator),
      quadrature_(quadrature),
      tail_(tail),
      truncation_(b) {
    if (!std::isfinite(a) || !(a < b)) throw ProblemError("interval requires finite a < b");
    if (regularity == Regularity::Regular && !std::isfinite(b))
        throw ProblemError("a regular problem requires a finite right endpoint");
    if (!std::isfinite(left_angle)) throw ProblemError("left boundary angle must be finite");

    interior_knots_ = coeffs_.breakpoints();
    interior_knots_.insert(interior_knots_.end(), mesh_knots.begin(), mesh_knots.end());
    std::sort(interior_knots_.begin(), interior_knots_.end());
    interior_knots_.erase(std::unique(interior_knots_.begin(), interior_knots_.end()), interior_knots_.end());
    std::erase_if(interior_knots_, [&](double k) { return !(k > a && k < b); });

    if (!infinite()) return;

    // Truncate [a, inf): grow b' until the weighted mass of phi_B(., 0),
    // psi_B(., 0) picked up by the last enlargement is negligible.
    double len = tail_.initial_length;
    double prev_end = a_;
    double mass = 0.0;
    for (;;) {
        const double end = a_ + len;
        auto [phi, psi] = phi_psi(*this, 0.0, end);
        std::vector<double> knots = quadrature_knots(*this, end, {phi.nodes(), psi.nodes()});
        std::erase_if(knots, [&](double k) { return k < prev_end; });
        if (knots.front() != prev_end) knots.insert(knots.begin(), prev_end);
        auto f = [&](double x) -> cplx {
            return coeffs_.weight(x) * (std::norm(phi.y(x)) + std::norm(psi.y(x)));
        };
        const double gained = integrate_panels(f, knots, quadrature_).value.real();
        mass += gained;
        if (prev_end > a_ && gained <= tail_.tail_tol * mass) {
            truncation_ = end;
            break;
        }
        prev_end = end;
        len *= tail_.growth;
        if (len > tail_.max_length)
            throw ProblemError("truncation of the infinite interval exceeded max_length; "
                               "the weighted tail does not decay (is the equation quasiregular?)");
    }
}

std::vector<double> Problem::knots(double upto) const {
    std::vector<double> k{a_};
    for (double x : interior_knots_)
        if (x > a_ && x < upto) k.push_back(x);
    k.push_back(upto);
    return k;
}

Trajectory::Trajectory(cplx lambda, double x0, State y0) : lambda_(lambda), x_{x0}, y_{y0} {}

void Trajectory::append(double x1, const State& y1, const std::array<State, 5>& dense) {
    x_.push_back(x1);
    y_.push_back(y1);
    dense_.push_back(dense);
}

Trajectory::State Trajectory::at(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double th = (x - x_[i]) / h;
    const double th1 = 1.0 - th;
    const auto& r = dense_[i];
    State out;
    for (int c = 0; c < 2; ++c)
        out[c] = r[0][c] + th * (r[1][c] + th1 * (r[2][c] + th * (r[3][c] + th1 * r[4][c])));
    return out;
}

Trajectory integrate(const Problem& problem, cplx lambda, cplx y0, cplx yp0, double upto) {
    if (!(upto > problem.a()) || upto > problem.b())
        throw ProblemError("integrate: upto must lie in (a, b]");
    if (!std::isfinite(upto)) throw ProblemError("integrate: upto must be finite");

    const IntegratorOptions& o = problem.integrator();
    System f(problem.coeffs(), lambda);
    const std::vector<double> knots = problem.knots(upto);

    Trajectory traj(lambda, problem.a(), State{y0, yp0});
    State y = traj.final_state();
    double h = 0.0;
    long steps = 0;

    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double lo = knots[s], hi = knots[s + 1];
        f.set_segment(lo, hi);
        double x = lo;
        State k1 = f(x, y);
        if (h == 0.0) h = initial_step(f, x, y, k1, hi - lo, o);
        bool last_rejected = false;

        while (x < hi) {
            bool final_step = false;
            if (x + h >= hi || x + 1.01 * h >= hi) {
                h = hi - x;
                final_step = true;
            }
            if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
                throw IntegrationError(x, "step size underflow");
            if (++steps > o.max_steps) throw IntegrationError(x, "maximum number of steps exceeded");

            using namespace dp;
            const State k2 = f(x + c2 * h, axpy(y, {{a21, &k1}}, h));
            const State k3 = f(x + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
            const State k4 = f(x + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
            const State k5 = f(x + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
            const State k6 =
                f(x + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
            const State y1 = axpy(y, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}}, h);
            const double xn = final_step ? hi : x + h;
            const State k7 = f(xn, y1);

            State err{};
            for (int c = 0; c < 2; ++c)
                err[c] = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c] + e7 * k7[c]);
            const double en = error_norm(err, y, y1, o);
            if (!std::isfinite(en)) throw IntegrationError(x, "non-finite solution");

            if (en <= 1.0) {
                std::array<State, 5> dense;
                for (int c = 0; c < 2; ++c) {
                    const cplx diff = y1[c] - y[c];
                    const cplx bspl = h * k1[c] - diff;
                    dense[0][c] = y[c];
                    dense[1][c] = diff;
                    dense[2][c] = bspl;
                    dense[3][c] = diff - h * k7[c] - bspl;
                    dense[4][c] =
                        h * (d1 * k1[c] + d3 * k3[c] + d4 * k4[c] + d5 * k5[c] + d6 * k6[c] + d7 * k7[c]);
                }
                traj.append(xn, y1, dense);
                x = xn;
                y = y1;
                k1 = k7;
                double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
                fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
                h *= fac;
                last_rejected = false;
            } else {
                h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
                last_rejected = true;
            }
        }
    }
    return traj;
}

std::pair<Trajectory, Trajectory> phi_psi(const Problem& problem, cplx lambda, double upto) {
    const double s = std::sin(problem.left_angle());
    const double c = std::cos(problem.left_angle());
    return {integrate(problem, lambda, s, -c, upto), integrate(problem, lambda, c, s, upto)};
}

std::pair<Trajectory, Trajectory> phi_psi(const Problem& problem, cplx lambda) {
    return phi_psi(problem, lambda, problem.truncation());
}

DeltaIntegrand::DeltaIntegrand(const Trajectory& t)
    : fn_([&t](double x) { return t.y(x); }), knots_(t.nodes().begin(), t.nodes().end()) {}

DeltaIntegrand::DeltaIntegrand(std::function<cplx(double)> f, std::vector<double> knots)
    : fn_(std::move(f)), knots_(std::move(knots)) {}

DeltaIntegrand::DeltaIntegrand(const RealFunction& f, std::vector<double> knots)
    : fn_([f](double x) { return cplx(f(x)); }), knots_(std::move(knots)) {}

std::vector<double> quadrature_knots(const Problem& problem, double upto,
                                     std::initializer_list<std::span<const double>> extra) {
    std::vector<double> k = problem.knots(upto);
    for (auto span : extra)
        for (double x : span)
            if (x > problem.a() && x < upto) k.push_back(x);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

cplx inner_delta(const Problem& problem, const DeltaIntegrand& f, const DeltaIntegrand& g) {
    const double upto = problem.truncation();
    const auto knots = quadrature_knots(problem, upto, {f.knots(), g.knots()});
    const Coefficients& c = problem.coeffs();
    auto integrand = [&](double x) { return c.weight(x) * f(x) * std::conj(g(x)); };
    return integrate_panels(integrand, knots, problem.quadrature()).value;
}

double norm_delta(const Problem& problem, const DeltaIntegrand& f) {
    const cplx v = inner_delta(problem, f, f);
    const double tol = 1e-9 * std::max(1.0, std::abs(v));
    if (std::abs(v.imag()) > tol) throw QuadratureError("norm_delta: inner product has a non-negligible imaginary part");
    return std::sqrt(std::max(0.0, v.real()));
}

}  // namespace sturmnev
