#pragma once

#include "sturmnev/spectrum.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sturmnev {

class ExpansionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Function to expand. y_quasi is p y'; f_y satisfies -(y^[1])' + q y = weight * f_y.
struct TargetFunction {
    RealFunction y;
    std::optional<RealFunction> y_quasi;
    std::optional<RealFunction> f_y;
    std::vector<double> breakpoints;

    /// From expression strings in x; `dy` is y' and becomes p * dy. Empty strings mean absent.
    static TargetFunction from_strings(const Problem& problem, const std::string& y, const std::string& dy = "",
                                       const std::string& f_y = "");
};

/// y_k = xi_k * yhat_k * phi_B(., t_k).
struct ExpansionTerm {
    int k = 0;
    double t = 0.0, xi = 0.0, yhat = 0.0;
    std::shared_ptr<const Trajectory> phi;

    double coefficient() const { return xi * yhat; }
    double value(double x) const { return coefficient() * phi->y(x).real(); }
    double quasi(double x) const { return coefficient() * phi->quasi(x).real(); }
};

/// yhat = integral of phi_B(x, t) weight(x) y(x) over [a, b'].
double fourier_coefficient(const Problem& problem, double t, const TargetFunction& y);
double fourier_coefficient(const Problem& problem, const Trajectory& phi, const TargetFunction& y);

ExpansionTerm eigenfunction_term(const Problem& problem, const Eigenvalue& eig, const TargetFunction& y, int k = 0);

/// Terms for every eigenvalue of `dsf`, computed in parallel and kept in order.
std::vector<ExpansionTerm> expansion_terms(const Problem& problem, const DiscreteSpectralFunction& dsf,
                                           const TargetFunction& y, unsigned threads = 0);

/// x -> sum of the first K terms.
class PartialSum {
public:
    PartialSum(const std::vector<ExpansionTerm>& terms, std::size_t K);
    double operator()(double x) const;
    double quasi(double x) const;
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<ExpansionTerm> terms_;
};

PartialSum partial_sum(const std::vector<ExpansionTerm>& terms, std::size_t K);

struct L2Row {
    std::size_t K = 0;
    double residual = 0.0;         // ||y - S_K||_weight
    double parseval_sum = 0.0;     // sum_{k<K} xi_k yhat_k^2
    double parseval_defect = 0.0;  // | ||y||^2 - parseval_sum |
};

struct L2Report {
    double norm_squared = 0.0;  // ||y||^2_weight
    std::vector<L2Row> rows;
};

L2Report l2_report(const Problem& problem, const TargetFunction& y, const std::vector<ExpansionTerm>& terms,
                   const std::vector<std::size_t>& Ks);

struct Eligibility {
    bool left_ok = false, right_ok = false, membership_ok = false;
    double left_defect = 0.0, right_defect = 0.0, membership_residual = 0.0;
    bool finite_difference = false;  // y^[1] or f_y was approximated
    std::string right_condition;     // EtaRelation::describe()
    bool eligible() const { return left_ok && right_ok && membership_ok; }
};

struct UniformRow {
    std::size_t K = 0;
    double sup_residual = 0.0;        // max over the grid of |y - S_K|
    double sup_quasi_residual = 0.0;  // same for y^[1]; NaN without y_quasi
};

struct UniformReport {
    Eligibility eligibility;
    bool guaranteed = false;  // false: "no uniform-convergence guarantee"
    std::vector<UniformRow> rows;
    std::vector<double> grid;
};

struct UniformOptions {
    int grid_points = 2049;
    bool check_eligibility = true;
    bool allow_finite_difference = false;
    double boundary_tol = 1e-8;
    double membership_tol = 1e-4;
    int membership_samples = 64;  // per knot segment
};

/// Equispaced points on [a, b'] with every coefficient breakpoint added.
std::vector<double> report_grid(const Problem& problem, int points);

UniformReport uniform_report(const CharacteristicPair& cp, const EtaRelation& eta, const TargetFunction& y,
                             const std::vector<ExpansionTerm>& terms, const std::vector<std::size_t>& Ks,
                             const UniformOptions& opts = {});

Eligibility check_eligibility(const CharacteristicPair& cp, const EtaRelation& eta, const TargetFunction& y,
                              const UniformOptions& opts = {});

}  // namespace sturmnev
