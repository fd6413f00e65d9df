#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sturmnev {

/// Where an expression is going to be used. Coefficients (p, q, weight,
/// target functions) are functions of `x`; boundary pair entries are
/// functions of `lambda`.
enum class Slot { Any, Coefficient, Pair };

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& message);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Func { Sin, Cos, Tan, Exp, Sqrt, Abs };

/// Immutable expression tree over the symbols `x` and `lambda`.
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          (right-associative)
///   primary := number | 'x' | 'lambda' | 'pi' | func '(' sum ')'
///            | 'indicator' '(' const ',' const ')' | '(' sum ')'
///
/// `indicator(lo, hi)` is 1 on the closed interval [lo, hi] of `x` and 0
/// elsewhere; its bounds must be constant expressions with lo < hi.
class Expr {
public:
    enum class Kind { Number, X, Lambda, Pi, Neg, Add, Sub, Mul, Div, Pow, Call, Indicator };

    struct Node {
        Kind kind = Kind::Number;
        double value = 0.0;  // Number
        Func func = Func::Sin;  // Call
        double lo = 0.0, hi = 0.0;  // Indicator
        std::shared_ptr<const Node> lhs, rhs;  // rhs only for binary ops
    };

    Expr();  // the constant 0

    static Expr parse(std::string_view src, Slot slot = Slot::Any);

    static Expr number(double v);
    static Expr x();
    static Expr lambda();
    static Expr pi();
    static Expr neg(const Expr& a);
    static Expr binary(Kind op, const Expr& a, const Expr& b);
    static Expr call(Func f, const Expr& a);
    static Expr indicator(double lo, double hi);

    /// Fully parenthesized form that re-parses to an identical tree.
    std::string to_string() const;

    double eval_real(double x) const;
    std::complex<double> eval_complex(std::complex<double> lambda) const;

    bool uses_x() const;
    bool uses_lambda() const;
    bool has_indicator() const;
    bool is_constant() const { return !uses_x() && !uses_lambda() && !has_indicator(); }

    /// True when the tree contains a construct that is not entire in
    /// `lambda` (division by, sqrt of, abs of, or non-integer power of a
    /// lambda-dependent subexpression). Entire functions written through
    /// such constructs (cos(sqrt(lambda))) are also flagged.
    bool maybe_non_entire() const;

    /// Sorted, de-duplicated indicator edges.
    std::vector<double> breakpoints() const;

    /// Throws ParseError(0, ...) when the tree is not admissible in `slot`.
    void validate_for(Slot slot) const;

    const Node& root() const { return *root_; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

std::string_view func_name(Func f);

}  // namespace sturmnev
