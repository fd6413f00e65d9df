#include "sturmnev/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace sturmnev {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Kind;

constexpr std::array<std::pair<std::string_view, Func>, 6> kFuncs{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
}};

std::shared_ptr<Expr::Node> make(Kind kind) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    return n;
}

bool is_binary(Kind k) {
    return k == Kind::Add || k == Kind::Sub || k == Kind::Mul || k == Kind::Div || k == Kind::Pow;
}

double eval_r(const Expr::Node& n, double x);

bool has_symbol(const Expr::Node& n);

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "empty expression");
        NodePtr n = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) fail("expected operator or end of input");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(pos_, "syntax error: " + what);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            Kind op;
            if (accept('+')) op = Kind::Add;
            else if (accept('-')) op = Kind::Sub;
            else return lhs;
            auto n = make(op);
            n->lhs = lhs;
            n->rhs = parse_product();
            lhs = n;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            Kind op;
            if (accept('*')) op = Kind::Mul;
            else if (accept('/')) op = Kind::Div;
            else return lhs;
            auto n = make(op);
            n->lhs = lhs;
            n->rhs = parse_unary();
            lhs = n;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) {
            auto n = make(Kind::Neg);
            n->lhs = parse_unary();
            return n;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) {
            auto n = make(Kind::Pow);
            n->lhs = base;
            n->rhs = parse_unary();
            return n;
        }
        return base;
    }

    double parse_constant() {
        const std::size_t start = pos_;
        NodePtr n = parse_sum();
        if (has_symbol(*n)) throw ParseError(start, "indicator bounds must be constants");
        return eval_r(*n, 0.0);
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected number, identifier or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr n = parse_sum();
            expect(')');
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("expected number, identifier or '('");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
                pos_ = p;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || text == ".") {
            pos_ = start;
            fail("malformed number");
        }
        auto n = make(Kind::Number);
        n->value = v;
        return n;
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return make(Kind::X);
        if (name == "lambda") return make(Kind::Lambda);
        if (name == "pi") return make(Kind::Pi);
        if (name == "indicator") {
            expect('(');
            const double lo = parse_constant();
            expect(',');
            const double hi = parse_constant();
            expect(')');
            if (!(lo < hi)) throw ParseError(start, "indicator requires lo < hi");
            auto n = make(Kind::Indicator);
            n->lo = lo;
            n->hi = hi;
            return n;
        }
        for (const auto& [fname, f] : kFuncs) {
            if (name == fname) {
                expect('(');
                auto n = make(Kind::Call);
                n->func = f;
                n->lhs = parse_sum();
                expect(')');
                return n;
            }
        }
        throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

bool any_node(const Expr::Node& n, auto&& pred) {
    if (pred(n)) return true;
    if (n.lhs && any_node(*n.lhs, pred)) return true;
    if (n.rhs && any_node(*n.rhs, pred)) return true;
    return false;
}

bool has_symbol(const Expr::Node& n) {
    return any_node(n, [](const Expr::Node& m) {
        return m.kind == Kind::X || m.kind == Kind::Lambda || m.kind == Kind::Indicator;
    });
}

bool depends_on_lambda(const Expr::Node& n) {
    return any_node(n, [](const Expr::Node& m) { return m.kind == Kind::Lambda; });
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Expr::Node& n, std::string& out) {
    switch (n.kind) {
    case Kind::Number: out += format_number(n.value); return;
    case Kind::X: out += "x"; return;
    case Kind::Lambda: out += "lambda"; return;
    case Kind::Pi: out += "pi"; return;
    case Kind::Neg:
        out += "(-";
        print(*n.lhs, out);
        out += ")";
        return;
    case Kind::Call:
        out += func_name(n.func);
        out += "(";
        print(*n.lhs, out);
        out += ")";
        return;
    case Kind::Indicator:
        out += "indicator(" + format_number(n.lo) + ", " + format_number(n.hi) + ")";
        return;
    default: break;
    }
    static constexpr std::string_view ops = "+-*/^";
    const char op = ops[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
    out += "(";
    print(*n.lhs, out);
    out += ' ';
    out += op;
    out += ' ';
    print(*n.rhs, out);
    out += ")";
}

bool same(const Expr::Node& a, const Expr::Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Kind::Number: return a.value == b.value;
    case Kind::Indicator: return a.lo == b.lo && a.hi == b.hi;
    case Kind::Call:
        if (a.func != b.func) return false;
        break;
    default: break;
    }
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    if (a.lhs && !same(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !same(*a.rhs, *b.rhs)) return false;
    return true;
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
    return v;
}

double eval_r(const Expr::Node& n, double x) {
    switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::X: return x;
    case Kind::Lambda: throw EvalError("lambda cannot be evaluated in real x-mode");
    case Kind::Pi: return std::numbers::pi;
    case Kind::Neg: return -eval_r(*n.lhs, x);
    case Kind::Add: return checked(eval_r(*n.lhs, x) + eval_r(*n.rhs, x), "+");
    case Kind::Sub: return checked(eval_r(*n.lhs, x) - eval_r(*n.rhs, x), "-");
    case Kind::Mul: return checked(eval_r(*n.lhs, x) * eval_r(*n.rhs, x), "*");
    case Kind::Div: {
        const double d = eval_r(*n.rhs, x);
        if (d == 0.0) throw EvalError("division by zero");
        return checked(eval_r(*n.lhs, x) / d, "/");
    }
    case Kind::Pow: return checked(std::pow(eval_r(*n.lhs, x), eval_r(*n.rhs, x)), "^");
    case Kind::Indicator: return (x >= n.lo && x <= n.hi) ? 1.0 : 0.0;
    case Kind::Call: {
        const double a = eval_r(*n.lhs, x);
        switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return checked(std::tan(a), "tan");
        case Func::Exp: return checked(std::exp(a), "exp");
        case Func::Sqrt:
            if (a < 0.0) throw EvalError("sqrt of negative value in real mode");
            return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        }
    }
    }
    throw EvalError("corrupt expression node");
}

using cplx = std::complex<double>;

cplx checked(cplx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw EvalError(std::string("non-finite result in ") + what);
    return v;
}

cplx int_pow(cplx base, long n) {
    const bool invert = n < 0;
    unsigned long e = invert ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    cplx result = 1.0;
    while (e) {
        if (e & 1UL) result *= base;
        base *= base;
        e >>= 1;
    }
    if (invert) {
        if (result == cplx(0.0)) throw EvalError("division by zero");
        result = 1.0 / result;
    }
    return result;
}

cplx eval_c(const Expr::Node& n, cplx lam) {
    switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::X: throw EvalError("x cannot be evaluated in complex lambda-mode");
    case Kind::Lambda: return lam;
    case Kind::Pi: return std::numbers::pi;
    case Kind::Neg: return -eval_c(*n.lhs, lam);
    case Kind::Add: return checked(eval_c(*n.lhs, lam) + eval_c(*n.rhs, lam), "+");
    case Kind::Sub: return checked(eval_c(*n.lhs, lam) - eval_c(*n.rhs, lam), "-");
    case Kind::Mul: return checked(eval_c(*n.lhs, lam) * eval_c(*n.rhs, lam), "*");
    case Kind::Div: {
        const cplx d = eval_c(*n.rhs, lam);
        if (d == cplx(0.0)) throw EvalError("division by zero");
        return checked(eval_c(*n.lhs, lam) / d, "/");
    }
    case Kind::Pow: {
        const cplx b = eval_c(*n.lhs, lam);
        const cplx e = eval_c(*n.rhs, lam);
        if (e.imag() == 0.0 && e.real() == std::nearbyint(e.real()) && std::abs(e.real()) <= 1024.0)
            return checked(int_pow(b, static_cast<long>(e.real())), "^");
        return checked(std::pow(b, e), "^");
    }
    case Kind::Indicator: throw EvalError("indicator cannot be evaluated in complex lambda-mode");
    case Kind::Call: {
        const cplx a = eval_c(*n.lhs, lam);
        switch (n.func) {
        case Func::Sin: return checked(std::sin(a), "sin");
        case Func::Cos: return checked(std::cos(a), "cos");
        case Func::Tan: return checked(std::tan(a), "tan");
        case Func::Exp: return checked(std::exp(a), "exp");
        case Func::Sqrt: return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        }
    }
    }
    throw EvalError("corrupt expression node");
}

void collect_breakpoints(const Expr::Node& n, std::vector<double>& out) {
    if (n.kind == Kind::Indicator) {
        out.push_back(n.lo);
        out.push_back(n.hi);
    }
    if (n.lhs) collect_breakpoints(*n.lhs, out);
    if (n.rhs) collect_breakpoints(*n.rhs, out);
}

bool non_entire(const Expr::Node& n) {
    switch (n.kind) {
    case Kind::Div:
        if (depends_on_lambda(*n.rhs)) return true;
        break;
    case Kind::Pow:
        if (depends_on_lambda(*n.rhs)) {
            if (depends_on_lambda(*n.lhs)) return true;
        } else if (depends_on_lambda(*n.lhs)) {
            // lambda^e is entire only for constant non-negative integer e
            if (has_symbol(*n.rhs)) return true;
            const double e = eval_r(*n.rhs, 0.0);
            if (e < 0.0 || e != std::nearbyint(e)) return true;
        }
        break;
    case Kind::Call:
        if ((n.func == Func::Sqrt || n.func == Func::Abs || n.func == Func::Tan) &&
            depends_on_lambda(*n.lhs))
            return true;
        break;
    default: break;
    }
    if (n.lhs && non_entire(*n.lhs)) return true;
    if (n.rhs && non_entire(*n.rhs)) return true;
    return false;
}

}  // namespace

std::string_view func_name(Func f) {
    for (const auto& [name, g] : kFuncs)
        if (g == f) return name;
    return "?";
}

Expr::Expr() : root_(make(Kind::Number)) {}

Expr Expr::parse(std::string_view src, Slot slot) {
    Parser p(src);
    Expr e(p.parse_all());
    e.validate_for(slot);
    return e;
}

Expr Expr::number(double v) {
    auto n = make(Kind::Number);
    n->value = v;
    return Expr(n);
}
Expr Expr::x() { return Expr(make(Kind::X)); }
Expr Expr::lambda() { return Expr(make(Kind::Lambda)); }
Expr Expr::pi() { return Expr(make(Kind::Pi)); }

Expr Expr::neg(const Expr& a) {
    auto n = make(Kind::Neg);
    n->lhs = a.root_;
    return Expr(n);
}

Expr Expr::binary(Kind op, const Expr& a, const Expr& b) {
    if (!is_binary(op)) throw std::invalid_argument("Expr::binary: not a binary operator");
    auto n = make(op);
    n->lhs = a.root_;
    n->rhs = b.root_;
    return Expr(n);
}

Expr Expr::call(Func f, const Expr& a) {
    auto n = make(Kind::Call);
    n->func = f;
    n->lhs = a.root_;
    return Expr(n);
}

Expr Expr::indicator(double lo, double hi) {
    if (!(lo < hi)) throw ParseError(0, "indicator requires lo < hi");
    auto n = make(Kind::Indicator);
    n->lo = lo;
    n->hi = hi;
    return Expr(n);
}

std::string Expr::to_string() const {
    std::string out;
    print(*root_, out);
    return out;
}

double Expr::eval_real(double x) const { return checked(eval_r(*root_, x), "expression"); }

std::complex<double> Expr::eval_complex(std::complex<double> lambda) const {
    return checked(eval_c(*root_, lambda), "expression");
}

bool Expr::uses_x() const {
    return any_node(*root_, [](const Node& n) { return n.kind == Kind::X; });
}
bool Expr::uses_lambda() const { return depends_on_lambda(*root_); }
bool Expr::has_indicator() const {
    return any_node(*root_, [](const Node& n) { return n.kind == Kind::Indicator; });
}

bool Expr::maybe_non_entire() const { return non_entire(*root_); }

std::vector<double> Expr::breakpoints() const {
    std::vector<double> out;
    collect_breakpoints(*root_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void Expr::validate_for(Slot slot) const {
    if (slot == Slot::Coefficient && uses_lambda()) throw ParseError(0, "lambda not allowed here");
    if (slot == Slot::Pair) {
        if (uses_x()) throw ParseError(0, "x not allowed here");
        if (has_indicator()) throw ParseError(0, "indicator not allowed here");
    }
}

bool operator==(const Expr& a, const Expr& b) { return same(*a.root_, *b.root_); }

}  // namespace sturmnev
