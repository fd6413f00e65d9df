#pragma once

#include "sturmnev/expr.hpp"
#include "sturmnev/quadrature.hpp"

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sturmnev {

using cplx = std::complex<double>;
using RealFunction = std::function<double(double)>;

class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(double x, const std::string& message);
    double x() const noexcept { return x_; }

private:
    double x_;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 5'000'000;
};

/// Truncation of a non-compact interval [a, inf): b' grows geometrically
/// from a + initial_length until the weighted mass of the lambda = 0
/// solutions gained on the last enlargement is below tail_tol (relative).
struct TailPolicy {
    double initial_length = 1.0;
    double growth = 2.0;
    double tail_tol = 1e-10;
    double max_length = 1e6;
};

enum class Regularity { Regular, Quasiregular };

/// p, q and the weight of -(p y')' + q y = lambda * weight * y.
class Coefficients {
public:
    Coefficients(RealFunction p, RealFunction q, RealFunction weight, std::vector<double> breakpoints = {});

    static Coefficients from_expressions(const Expr& p, const Expr& q, const Expr& weight);

    double p(double x) const { return p_(x); }
    double q(double x) const { return q_(x); }
    double weight(double x) const { return w_(x); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

private:
    RealFunction p_, q_, w_;
    std::vector<double> breakpoints_;
};

struct CoefficientReport {
    bool finite = true;
    bool p_positive = true;
    bool weight_nonnegative = true;
    bool weight_nontrivial = true;
    double min_weight = 0.0;
    double positive_measure = 0.0;  // estimated measure of {weight > 0}
    std::vector<std::string> messages;
    bool ok() const { return finite && p_positive && weight_nonnegative && weight_nontrivial; }
};

/// Samples the coefficients on every knot segment of [a, b].
CoefficientReport check_coefficients(const Coefficients& c, double a, double b, int samples_per_segment = 256);

/// The differential side of the eigenvalue problem together with the left
/// boundary condition cos B * y(a) + sin B * y^[1](a) = 0.
class Problem {
public:
    static constexpr double infinity = std::numeric_limits<double>::infinity();

    Problem(double a, double b, Regularity regularity, Coefficients coeffs, double left_angle,
            IntegratorOptions integrator = {}, QuadratureOptions quadrature = {}, TailPolicy tail = {},
            std::vector<double> mesh_knots = {});

    double a() const { return a_; }
    double b() const { return b_; }
    bool infinite() const { return b_ == infinity; }
    Regularity regularity() const { return regularity_; }
    const Coefficients& coeffs() const { return coeffs_; }
    double left_angle() const { return left_angle_; }
    const IntegratorOptions& integrator() const { return integrator_; }
    const QuadratureOptions& quadrature() const { return quadrature_; }
    const TailPolicy& tail() const { return tail_; }

    /// Right end actually integrated to: b itself, or the truncation point.
    double truncation() const { return truncation_; }

    /// a, every breakpoint and mesh knot strictly inside (a, upto), upto.
    std::vector<double> knots(double upto) const;

private:
    double a_, b_;
    Regularity regularity_;
    Coefficients coeffs_;
    double left_angle_;
    IntegratorOptions integrator_;
    QuadratureOptions quadrature_;
    TailPolicy tail_;
    std::vector<double> interior_knots_;
    double truncation_;
};

/// Solution of the quasi-derivative system y' = y1 / p, y1' = (q - lambda w) y
/// with DOPRI5 dense output between the accepted step points.
class Trajectory {
public:
    using State = std::array<cplx, 2>;  // (y, y^[1])

    Trajectory(cplx lambda, double x0, State y0);

    cplx lambda() const { return lambda_; }
    std::span<const double> nodes() const { return x_; }
    std::span<const State> values() const { return y_; }
    double start() const { return x_.front(); }
    double end() const { return x_.back(); }
    const State& final_state() const { return y_.back(); }

    State at(double x) const;
    cplx y(double x) const { return at(x)[0]; }
    cplx quasi(double x) const { return at(x)[1]; }

    void append(double x1, const State& y1, const std::array<State, 5>& dense);

private:
    cplx lambda_;
    std::vector<double> x_;
    std::vector<State> y_;
    std::vector<std::array<State, 5>> dense_;
};

Trajectory integrate(const Problem& problem, cplx lambda, cplx y0, cplx yp0, double upto);

/// phi_B with (sin B, -cos B) and psi_B with (cos B, sin B) at x = a.
std::pair<Trajectory, Trajectory> phi_psi(const Problem& problem, cplx lambda, double upto);
std::pair<Trajectory, Trajectory> phi_psi(const Problem& problem, cplx lambda);

/// Either a trajectory or a plain callable on [a, b'].
class DeltaIntegrand {
public:
    DeltaIntegrand(const Trajectory& t);  // NOLINT: implicit by intent
    DeltaIntegrand(std::function<cplx(double)> f, std::vector<double> knots = {});
    DeltaIntegrand(const RealFunction& f, std::vector<double> knots = {});

    cplx operator()(double x) const { return fn_(x); }
    const std::vector<double>& knots() const { return knots_; }

private:
    std::function<cplx(double)> fn_;
    std::vector<double> knots_;
};

/// (f, g)_weight = integral over [a, b'] of weight * f * conj(g).
cplx inner_delta(const Problem& problem, const DeltaIntegrand& f, const DeltaIntegrand& g);
double norm_delta(const Problem& problem, const DeltaIntegrand& f);

/// Merged, sorted quadrature knots for the weighted integral over [a, upto].
std::vector<double> quadrature_knots(const Problem& problem, double upto,
                                     std::initializer_list<std::span<const double>> extra);

}  // namespace sturmnev
