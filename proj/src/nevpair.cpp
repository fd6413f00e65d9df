#include "sturmnev/nevpair.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace sturmnev {

EntirePair::EntirePair(ComplexFunction c0, ComplexFunction c1, std::string c0_src, std::string c1_src)
    : c0_(std::move(c0)), c1_(std::move(c1)), c0_src_(std::move(c0_src)), c1_src_(std::move(c1_src)) {}

EntirePair EntirePair::from_expressions(const Expr& c0, const Expr& c1) {
    c0.validate_for(Slot::Pair);
    c1.validate_for(Slot::Pair);
    EntirePair p([c0](cplx l) { return c0.eval_complex(l); }, [c1](cplx l) { return c1.eval_complex(l); },
                 c0.to_string(), c1.to_string());
    p.maybe_non_entire_ = c0.maybe_non_entire() || c1.maybe_non_entire();
    return p;
}

EntirePair EntirePair::from_strings(std::string_view c0, std::string_view c1) {
    return from_expressions(Expr::parse(c0, Slot::Pair), Expr::parse(c1, Slot::Pair));
}

EntirePair EntirePair::constant_angle(double b1) {
    const double c = std::cos(b1), s = std::sin(b1);
    char buf0[40], buf1[40];
    std::snprintf(buf0, sizeof buf0, "%.17g", c);
    std::snprintf(buf1, sizeof buf1, "%.17g", s);
    return EntirePair([c](cplx) { return cplx(c); }, [s](cplx) { return cplx(s); }, buf0, buf1);
}

EntirePair EntirePair::scaled(ComplexFunction g, std::string g_src) const {
    EntirePair p([c0 = c0_, g](cplx l) { return c0(l) * g(l); }, [c1 = c1_, g](cplx l) { return c1(l) * g(l); },
                 "(" + c0_src_ + ") * " + g_src, "(" + c1_src_ + ") * " + g_src);
    p.maybe_non_entire_ = maybe_non_entire_;
    return p;
}

SamplingPlan SamplingPlan::standard() {
    SamplingPlan plan;
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        for (int k = 0; k < 16; ++k) {
            // offset keeps samples off the real axis
            const double th = (k + 0.5) * std::numbers::pi / 8.0;
            plan.points.push_back(std::polar(r, th));
        }
    }
    for (int k = 0; k <= 64; ++k) plan.points.emplace_back(-32.0 + k, 0.0);
    return plan;
}

bool ValidationReport::passed() const {
    return no_common_zeros.passed && nevanlinna_sign.passed && symmetry.passed && evaluation_errors.empty();
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    for (const ConditionCheck* c : {&no_common_zeros, &nevanlinna_sign, &symmetry})
        if (!c->passed) out.push_back(c->name);
    for (const auto& e : evaluation_errors) out.push_back("evaluation failed: " + e);
    return out;
}

namespace {

void record(ConditionCheck& c, double violation, cplx at, double tol) {
    if (violation > c.worst) {
        c.worst = violation;
        c.at = at;
    }
    if (violation > tol) c.passed = false;
}

}  // namespace

ValidationReport validate_pair(const EntirePair& pair, const SamplingPlan& plan, double tol) {
    ValidationReport r;
    r.no_common_zeros.name = "no common zeros: |C0| + |C1| > 0";
    r.nevanlinna_sign.name = "Im(lambda) * Im(C1 conj(C0)) >= 0";
    r.symmetry.name = "C1(conj l) conj(C0(l)) - conj(C1(l)) C0(conj l) = 0";
    r.realness.name = "C0, C1 real on the real axis";
    r.non_entire_hint = pair.maybe_non_entire();
    r.no_common_zeros.worst = std::numeric_limits<double>::infinity();

    for (const cplx l : plan.points) {
        try {
            const cplx c0 = pair.c0(l), c1 = pair.c1(l);
            const double scale = std::norm(c0) + std::norm(c1);
            const double mag = std::abs(c0) + std::abs(c1);
            // no_common_zeros.worst tracks the smallest |C0| + |C1| seen
            if (mag < r.no_common_zeros.worst) {
                r.no_common_zeros.worst = mag;
                r.no_common_zeros.at = l;
            }
            if (!(mag > tol)) r.no_common_zeros.passed = false;
            if (!(scale > 0.0)) continue;

            if (l.imag() == 0.0) {
                const double v = (std::abs(c0.imag()) + std::abs(c1.imag())) / std::sqrt(scale);
                record(r.realness, v, l, tol);
                continue;
            }
            const double sign = l.imag() > 0.0 ? 1.0 : -1.0;
            record(r.nevanlinna_sign, std::max(0.0, -sign * (c1 * std::conj(c0)).imag() / scale), l, tol);

            const cplx lc = std::conj(l);
            const cplx c0c = pair.c0(lc), c1c = pair.c1(lc);
            const double scale_c = std::norm(c0c) + std::norm(c1c);
            const cplx defect = c1c * std::conj(c0) - std::conj(c1) * c0c;
            record(r.symmetry, std::abs(defect) / std::sqrt(scale * scale_c), l, tol);
        } catch (const std::exception& e) {
            if (r.evaluation_errors.size() < 4) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " (lambda = %g%+gi)", l.real(), l.imag());
                r.evaluation_errors.push_back(e.what() + std::string(buf));
            }
        }
    }
    r.real_on_axis = r.realness.passed;
    return r;
}

std::optional<cplx> tau(const EntirePair& pair, cplx lambda) {
    const cplx c1 = pair.c1(lambda);
    if (c1 == cplx(0.0)) return std::nullopt;
    return -pair.c0(lambda) / c1;
}

bool c1_identically_zero(const EntirePair& pair) {
    for (int k = 0; k < 32; ++k) {
        const double r = 0.3 + 0.7 * k;
        const cplx l = std::polar(r, 0.37 + 2.0 * std::numbers::pi * k / 32.0);
        const cplx c0 = pair.c0(l), c1 = pair.c1(l);
        if (std::abs(c1) > 1e-14 * std::abs(c0)) return false;
    }
    return true;
}

ClassificationError::ClassificationError(const std::string& message, std::vector<double> ladder,
                                         std::vector<cplx> samples)
    : std::runtime_error(message), ladder_(std::move(ladder)), samples_(std::move(samples)) {}

CaseClassification classify_infinity(const EntirePair& pair, const ClassifyOptions& opts) {
    CaseClassification out;
    if (c1_identically_zero(pair)) {
        out.kind = InfinityCase::DegeneratePair;
        return out;
    }

    for (int k = 0; k <= opts.decades; ++k) {
        const double y = opts.y_min * std::pow(10.0, k);
        std::optional<cplx> t;
        try {
            t = tau(pair, cplx(0.0, y));
        } catch (const std::exception&) {
            break;
        }
        if (!t || !std::isfinite(t->real()) || !std::isfinite(t->imag())) break;
        out.ladder.push_back(y);
        out.tau_samples.push_back(*t);
    }
    const std::size_t n = out.ladder.size();
    if (n < 2)
        throw ClassificationError("limit ladder too short: tau(iy) is not finite for large y", out.ladder,
                                  out.tau_samples);

    auto ratio = [&](std::size_t i) { return out.tau_samples[i].imag() / out.ladder[i]; };
    const double step = out.ladder[n - 1] / out.ladder[n - 2];
    // first-order Richardson for an O(1/y) approach to the limit
    const double b_est = (step * ratio(n - 1) - ratio(n - 2)) / (step - 1.0);
    if (std::abs(b_est) > opts.zero_tol) {
        out.kind = InfinityCase::Case1;
        out.b_inf = b_est;
        return out;
    }
    out.b_inf = 0.0;

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = out.ladder[i] * out.tau_samples[i].imag();
    bool increasing = true;
    for (std::size_t i = 1; i < n; ++i) increasing = increasing && g[i] >= g[i - 1];
    const bool grows = g.front() > 0.0 && g.back() >= opts.growth_factor * g.front();
    if (increasing && grows) {
        out.kind = InfinityCase::Case3;
        out.dhat_inf = std::numeric_limits<double>::infinity();
        return out;
    }
    const double scale_g = std::max(1.0, std::abs(g.back()));
    if (std::abs(g[n - 1] - g[n - 2]) > opts.converge_tol * scale_g)
        throw ClassificationError("y Im tau(iy) neither converges nor grows past the threshold", out.ladder,
                                  out.tau_samples);
    const double d_last = out.tau_samples[n - 1].real(), d_prev = out.tau_samples[n - 2].real();
    if (std::abs(d_last - d_prev) > opts.converge_tol * std::max(1.0, std::abs(d_last)))
        throw ClassificationError("tau(iy) does not converge", out.ladder, out.tau_samples);
    out.kind = InfinityCase::Case2;
    out.dhat_inf = g.back();
    out.d_inf = d_last;
    return out;
}

std::string EtaRelation::describe() const {
    switch (kind) {
    case EtaKind::Gamma0Zero: return "Gamma0b y = 0";
    case EtaKind::Robin: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "Gamma1b y = %.17g * Gamma0b y", d_inf);
        return buf;
    }
    case EtaKind::BothZero: return "Gamma0b y = Gamma1b y = 0";
    }
    return "?";
}

EtaRelation eta_relation(const CaseClassification& c) {
    switch (c.kind) {
    case InfinityCase::Case1:
    case InfinityCase::DegeneratePair: return {EtaKind::Gamma0Zero, 0.0};
    case InfinityCase::Case2: return {EtaKind::Robin, c.d_inf.value_or(0.0)};
    case InfinityCase::Case3: return {EtaKind::BothZero, 0.0};
    }
    return {};
}

std::string to_string(InfinityCase c) {
    switch (c) {
    case InfinityCase::Case1: return "Case1";
    case InfinityCase::Case2: return "Case2";
    case InfinityCase::Case3: return "Case3";
    case InfinityCase::DegeneratePair: return "DegeneratePair";
    }
    return "?";
}

}  // namespace sturmnev
