#include "sturmnev/expansion.hpp"

#include "sturmnev/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sturmnev {

TargetFunction TargetFunction::from_strings(const Problem& problem, const std::string& y, const std::string& dy,
                                            const std::string& f_y) {
    TargetFunction t;
    const Expr ey = Expr::parse(y, Slot::Coefficient);
    t.y = [ey](double x) { return ey.eval_real(x); };
    t.breakpoints = ey.breakpoints();
    auto add_breaks = [&t](const Expr& e) {
        const auto b = e.breakpoints();
        t.breakpoints.insert(t.breakpoints.end(), b.begin(), b.end());
    };
    if (!dy.empty()) {
        const Expr ed = Expr::parse(dy, Slot::Coefficient);
        t.y_quasi = [ed, c = problem.coeffs()](double x) { return c.p(x) * ed.eval_real(x); };
        add_breaks(ed);
    }
    if (!f_y.empty()) {
        const Expr ef = Expr::parse(f_y, Slot::Coefficient);
        t.f_y = [ef](double x) { return ef.eval_real(x); };
        add_breaks(ef);
    }
    std::sort(t.breakpoints.begin(), t.breakpoints.end());
    t.breakpoints.erase(std::unique(t.breakpoints.begin(), t.breakpoints.end()), t.breakpoints.end());
    return t;
}

double fourier_coefficient(const Problem& problem, const Trajectory& phi, const TargetFunction& y) {
    return inner_delta(problem, DeltaIntegrand(phi), DeltaIntegrand(y.y, y.breakpoints)).real();
}

namespace {

Trajectory phi_at(const Problem& problem, double t) {
    return integrate(problem, cplx(t), std::sin(problem.left_angle()), -std::cos(problem.left_angle()),
                     problem.truncation());
}

std::vector<double> residual_knots(const Problem& problem, const TargetFunction& y,
                                   const std::vector<ExpansionTerm>& terms, std::size_t K) {
    std::span<const double> finest;
    if (K > 0) finest = terms[K - 1].phi->nodes();
    return quadrature_knots(problem, problem.truncation(), {std::span<const double>(y.breakpoints), finest});
}

}  // namespace

double fourier_coefficient(const Problem& problem, double t, const TargetFunction& y) {
    return fourier_coefficient(problem, phi_at(problem, t), y);
}

ExpansionTerm eigenfunction_term(const Problem& problem, const Eigenvalue& eig, const TargetFunction& y, int k) {
    ExpansionTerm term;
    term.k = k;
    term.t = eig.t;
    term.xi = eig.residue_xi;
    auto phi = std::make_shared<const Trajectory>(phi_at(problem, eig.t));
    term.yhat = fourier_coefficient(problem, *phi, y);
    term.phi = std::move(phi);
    return term;
}

std::vector<ExpansionTerm> expansion_terms(const Problem& problem, const DiscreteSpectralFunction& dsf,
                                           const TargetFunction& y, unsigned threads) {
    return parallel_map(
        dsf.eigenvalues.size(),
        [&](std::size_t k) { return eigenfunction_term(problem, dsf.eigenvalues[k], y, static_cast<int>(k)); },
        threads);
}

PartialSum::PartialSum(const std::vector<ExpansionTerm>& terms, std::size_t K) {
    if (K > terms.size()) throw ExpansionError("partial sum needs more terms than were computed");
    terms_.assign(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(K));
}

double PartialSum::operator()(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.value(x);
    return s;
}

double PartialSum::quasi(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.quasi(x);
    return s;
}

PartialSum partial_sum(const std::vector<ExpansionTerm>& terms, std::size_t K) { return PartialSum(terms, K); }

L2Report l2_report(const Problem& problem, const TargetFunction& y, const std::vector<ExpansionTerm>& terms,
                   const std::vector<std::size_t>& Ks) {
    L2Report r;
    const auto& c = problem.coeffs();
    const std::vector<double> base = quadrature_knots(problem, problem.truncation(), {std::span<const double>(y.breakpoints)});
    r.norm_squared =
        integrate_panels([&](double x) -> cplx { return c.weight(x) * y.y(x) * y.y(x); }, base, problem.quadrature())
            .value.real();
    for (std::size_t K : Ks) {
        const PartialSum s(terms, K);
        L2Row row;
        row.K = K;
        const auto knots = residual_knots(problem, y, terms, K);
        const double sq = integrate_panels(
                              [&](double x) -> cplx {
                                  const double d = y.y(x) - s(x);
                                  return c.weight(x) * d * d;
                              },
                              knots, problem.quadrature())
                              .value.real();
        row.residual = std::sqrt(std::max(0.0, sq));
        for (std::size_t k = 0; k < K; ++k) row.parseval_sum += terms[k].xi * terms[k].yhat * terms[k].yhat;
        row.parseval_defect = std::abs(r.norm_squared - row.parseval_sum);
        r.rows.push_back(row);
    }
    return r;
}

std::vector<double> report_grid(const Problem& problem, int points) {
    if (points < 2) throw ExpansionError("report grid needs at least two points");
    const double a = problem.a(), b = problem.truncation();
    std::vector<double> g;
    g.reserve(points + problem.coeffs().breakpoints().size());
    for (int i = 0; i < points; ++i) g.push_back(i + 1 == points ? b : a + (b - a) * i / (points - 1));
    for (double k : problem.coeffs().breakpoints())
        if (k > a && k < b) g.push_back(k);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

namespace {

struct Derivatives {
    const Problem& problem;
    const TargetFunction& y;

    // y^[1] at x, one-sided near the ends of [lo, hi]
    double quasi(double x, double lo, double hi) const {
        if (y.y_quasi) return (*y.y_quasi)(x);
        const double h = 1e-5 * (hi - lo);
        double d;
        if (x - 2 * h < lo) d = (-3 * y.y(x) + 4 * y.y(x + h) - y.y(x + 2 * h)) / (2 * h);
        else if (x + 2 * h > hi) d = (3 * y.y(x) - 4 * y.y(x - h) + y.y(x - 2 * h)) / (2 * h);
        else d = (y.y(x + h) - y.y(x - h)) / (2 * h);
        return problem.coeffs().p(x) * d;
    }

    // (y^[1])' at an interior point of [lo, hi]
    double quasi_derivative(double x, double lo, double hi) const {
        if (y.y_quasi) {
            const double h = 1e-4 * (hi - lo);
            return ((*y.y_quasi)(x + h) - (*y.y_quasi)(x - h)) / (2 * h);
        }
        const double h = 1e-3 * (hi - lo);
        const auto& c = problem.coeffs();
        return (c.p(x + h / 2) * (y.y(x + h) - y.y(x)) - c.p(x - h / 2) * (y.y(x) - y.y(x - h))) / (h * h);
    }
};

}  // namespace

Eligibility check_eligibility(const CharacteristicPair& cp, const EtaRelation& eta, const TargetFunction& y,
                              const UniformOptions& opts) {
    const Problem& pr = cp.problem();
    if (!opts.allow_finite_difference && (!y.y_quasi || !y.f_y))
        throw ExpansionError("eligibility check needs y' and f_y (or finite differences enabled)");
    Eligibility e;
    e.finite_difference = !y.y_quasi || !y.f_y;
    e.right_condition = eta.describe();
    const Derivatives d{pr, y};
    const double a = pr.a(), b = pr.truncation();

    const double ya = y.y(a), y1a = d.quasi(a, a, b);
    const double B = pr.left_angle();
    e.left_defect = std::abs(std::cos(B) * ya + std::sin(B) * y1a) / std::max(1.0, std::abs(ya) + std::abs(y1a));
    e.left_ok = e.left_defect <= opts.boundary_tol;

    const auto [g0c, g1c] = cp.boundary_values(y.y(b), d.quasi(b, a, b));
    const double g0 = g0c.real(), g1 = g1c.real();
    double defect = 0.0;
    switch (eta.kind) {
    case EtaKind::Gamma0Zero: defect = std::abs(g0); break;
    case EtaKind::Robin: defect = std::abs(g1 - eta.d_inf * g0); break;
    case EtaKind::BothZero: defect = std::max(std::abs(g0), std::abs(g1)); break;
    }
    e.right_defect = defect / std::max(1.0, std::abs(g0) + std::abs(g1));
    e.right_ok = e.right_defect <= opts.boundary_tol;

    // -(y^[1])' + q y = weight * f_y inside every knot segment
    std::vector<double> knots = quadrature_knots(pr, b, {std::span<const double>(y.breakpoints)});
    const auto& c = pr.coeffs();
    double worst = 0.0, scale = 1.0;
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double lo = knots[s], hi = knots[s + 1];
        for (int j = 0; j < opts.membership_samples; ++j) {
            const double x = lo + (hi - lo) * (j + 0.5) / opts.membership_samples;
            const double lhs_d = -d.quasi_derivative(x, lo, hi), lhs_q = c.q(x) * y.y(x);
            const double w = c.weight(x);
            double rhs = 0.0;
            if (y.f_y) rhs = w * (*y.f_y)(x);
            else if (w > 0.0) rhs = lhs_d + lhs_q;  // f_y defined through the equation
            worst = std::max(worst, std::abs(lhs_d + lhs_q - rhs));
            scale = std::max(scale, std::abs(lhs_d) + std::abs(lhs_q) + std::abs(rhs));
        }
    }
    e.membership_residual = worst / scale;
    e.membership_ok = e.membership_residual <= opts.membership_tol;
    return e;
}

UniformReport uniform_report(const CharacteristicPair& cp, const EtaRelation& eta, const TargetFunction& y,
                             const std::vector<ExpansionTerm>& terms, const std::vector<std::size_t>& Ks,
                             const UniformOptions& opts) {
    UniformReport r;
    if (opts.check_eligibility) {
        r.eligibility = check_eligibility(cp, eta, y, opts);
        r.guaranteed = r.eligibility.eligible();
    }
    r.grid = report_grid(cp.problem(), opts.grid_points);
    std::size_t kmax = 0;
    for (std::size_t K : Ks) kmax = std::max(kmax, K);
    if (kmax > terms.size()) throw ExpansionError("requested K exceeds the number of computed terms");

    const bool quasi = y.y_quasi.has_value();
    for (std::size_t K : Ks) r.rows.push_back({K, 0.0, quasi ? 0.0 : std::numeric_limits<double>::quiet_NaN()});
    for (double x : r.grid) {
        const double yx = y.y(x);
        const double y1 = quasi ? (*y.y_quasi)(x) : 0.0;
        double s = 0.0, s1 = 0.0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < Ks.size(); ++i) {
            // Ks need not be sorted; restart when they go down
            if (Ks[i] < k) {
                k = 0;
                s = s1 = 0.0;
            }
            for (; k < Ks[i]; ++k) {
                s += terms[k].value(x);
                if (quasi) s1 += terms[k].quasi(x);
            }
            r.rows[i].sup_residual = std::max(r.rows[i].sup_residual, std::abs(yx - s));
            if (quasi) r.rows[i].sup_quasi_residual = std::max(r.rows[i].sup_quasi_residual, std::abs(y1 - s1));
        }
    }
    return r;
}

}  // namespace sturmnev
