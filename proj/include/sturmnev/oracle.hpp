#pragma once

#include "sturmnev/characteristic.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace sturmnev {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root of f on [lo, hi] by bisection; needs f(lo) f(hi) < 0 (or a zero endpoint).
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

/// C0 = M0 - lambda N0, C1 = M1 - lambda N1 acting on y(b), y^[1](b).
struct AffinePair {
    double m0 = 0.0, n0 = 0.0, m1 = 0.0, n1 = 0.0;
};

/// The pair of `cp` in the y(b), y^[1](b) convention; throws OracleError when it is not affine in lambda.
AffinePair affine_pair(const CharacteristicPair& cp);

/// Symmetric tridiagonal A and diagonal mass: A v = lambda diag(mass) v.
/// Rows with zero mass produce infinite eigenvalues.
struct Pencil {
    Eigen::VectorXd a_diag, a_off, mass;
    int n = 0;               // grid intervals
    bool companion = false;  // last unknown carries a lambda-rational boundary term

    Eigen::Index size() const { return a_diag.size(); }
    Eigen::MatrixXd dense_a() const;
    Eigen::MatrixXd dense_b() const;
};

/// Central differences on n + 1 equispaced nodes of [a, b'] with half-cell
/// flux balance at both ends; the right condition is folded into the last
/// row (and a companion unknown when C1 depends on lambda).
Pencil discretize(const CharacteristicPair& cp, int n);

enum class PencilMethod {
    Condensed,  // eliminate zero-mass unknowns, then a symmetric tridiagonal eigensolver
    DenseQZ     // generalized Schur form of the dense pencil
};

std::vector<double> pencil_eigenvalues(const Pencil& p, double lo, double hi,
                                       PencilMethod method = PencilMethod::Condensed);

struct EigenMatch {
    double engine = 0.0, oracle = 0.0, gap = 0.0;
};

struct MatchReport {
    std::vector<EigenMatch> pairs;
    std::vector<double> unmatched_engine, unmatched_oracle;
    double max_gap = 0.0;
    bool ok(double tol) const { return unmatched_engine.empty() && unmatched_oracle.empty() && max_gap <= tol; }
};

/// Nearest-neighbour matching of two sorted lists inside [lo, hi]; values
/// within tol of an end of the window may go unmatched.
MatchReport match_eigenvalues(const std::vector<double>& engine, const std::vector<double>& oracle, double lo,
                              double hi, double tol);

}  // namespace sturmnev
