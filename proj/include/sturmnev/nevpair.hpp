#pragma once

#include "sturmnev/expr.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sturmnev {

using cplx = std::complex<double>;
using ComplexFunction = std::function<cplx(cplx)>;

/// Right boundary condition C0(lambda) * G0 y + C1(lambda) * G1 y = 0 given by
/// two entire functions. G0, G1 are the boundary values of the problem's
/// regularity class (see Problem).
class EntirePair {
public:
    EntirePair(ComplexFunction c0, ComplexFunction c1, std::string c0_src = "?", std::string c1_src = "?");

    static EntirePair from_expressions(const Expr& c0, const Expr& c1);
    static EntirePair from_strings(std::string_view c0, std::string_view c1);
    /// (cos B1, sin B1): the lambda-independent condition cos B1 y(b) + sin B1 y^[1](b) = 0.
    static EntirePair constant_angle(double b1);

    cplx c0(cplx lambda) const { return c0_(lambda); }
    cplx c1(cplx lambda) const { return c1_(lambda); }
    const std::string& c0_source() const { return c0_src_; }
    const std::string& c1_source() const { return c1_src_; }

    /// Pair (C0 g, C1 g); for zero-free entire g this is the same condition.
    EntirePair scaled(ComplexFunction g, std::string g_src = "g") const;

    /// Static hint from the source expressions; true when an entry is
    /// written with constructs that are not entire in lambda.
    bool maybe_non_entire() const { return maybe_non_entire_; }

private:
    ComplexFunction c0_, c1_;
    std::string c0_src_, c1_src_;
    bool maybe_non_entire_ = false;
};

struct SamplingPlan {
    std::vector<cplx> points;  // both half-planes and a real segment

    /// Rings of radii {0.25, 0.5, 1, 2, 4, 8, 16, 32} x 16 angles plus 65 real points in [-32, 32].
    static SamplingPlan standard();
};

struct ConditionCheck {
    std::string name;
    double worst = 0.0;  // worst scaled violation (>= 0)
    cplx at = 0.0;       // sample where it occurred
    bool passed = true;
};

struct ValidationReport {
    ConditionCheck no_common_zeros;   // |C0| + |C1| > 0
    ConditionCheck nevanlinna_sign;   // Im l * Im(C1 conj C0) >= 0
    ConditionCheck symmetry;          // C1(conj l) conj C0(l) - conj C1(l) C0(conj l) = 0
    ConditionCheck realness;          // C0, C1 real on the real axis
    bool real_on_axis = false;
    bool non_entire_hint = false;
    std::vector<std::string> evaluation_errors;
    bool passed() const;
    std::vector<std::string> failures() const;
};

ValidationReport validate_pair(const EntirePair& pair, const SamplingPlan& plan = SamplingPlan::standard(),
                               double tol = 1e-9);

/// tau = -C0 / C1; nullopt stands for the point at infinity (C1(lambda) = 0).
std::optional<cplx> tau(const EntirePair& pair, cplx lambda);

/// True when C1 vanishes at all 32 sample points.
bool c1_identically_zero(const EntirePair& pair);

enum class InfinityCase { Case1, Case2, Case3, DegeneratePair };

struct CaseClassification {
    InfinityCase kind = InfinityCase::Case1;
    double b_inf = 0.0;                 // lim tau(iy) / (iy)
    double dhat_inf = 0.0;              // lim y Im tau(iy); +inf in Case 3
    std::optional<double> d_inf;        // lim tau(iy), Case 2 only
    std::vector<double> ladder;         // y values used
    std::vector<cplx> tau_samples;      // tau(i y) on the ladder
};

struct ClassifyOptions {
    double y_min = 1e2;
    int decades = 6;                    // ladder y_min * 10^k, k = 0..decades
    double growth_factor = 1e6;         // y Im tau growth declaring Dhat = inf
    double zero_tol = 1e-8;             // |B_inf| below this counts as 0
    double converge_tol = 1e-6;         // relative agreement of the last two estimates
};

class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& message, std::vector<double> ladder, std::vector<cplx> samples);
    const std::vector<double>& ladder() const { return ladder_; }
    const std::vector<cplx>& samples() const { return samples_; }

private:
    std::vector<double> ladder_;
    std::vector<cplx> samples_;
};

CaseClassification classify_infinity(const EntirePair& pair, const ClassifyOptions& opts = {});

enum class EtaKind { Gamma0Zero, Robin, BothZero };

struct EtaRelation {
    EtaKind kind = EtaKind::Gamma0Zero;
    double d_inf = 0.0;  // Robin only: G1 y = d_inf * G0 y
    std::string describe() const;
};

EtaRelation eta_relation(const CaseClassification& c);

std::string to_string(InfinityCase c);

}  // namespace sturmnev
