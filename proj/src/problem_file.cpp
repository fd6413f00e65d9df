#include "sturmnev/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace sturmnev {

using nlohmann::json;

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

namespace {

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key)) throw SchemaError(path.empty() ? key : path + "." + key, "unknown key");
}

const json& required(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw SchemaError(path.empty() ? key : path + "." + key, "missing required key");
    return obj.at(key);
}

double number(const json& v, const std::string& path, bool allow_infinity = false) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw SchemaError(path, "expected a number or a constant expression");
    const std::string s = v.get<std::string>();
    if (allow_infinity && (s == "inf" || s == "infinity" || s == "+inf")) return Problem::infinity;
    try {
        const Expr e = Expr::parse(s);
        if (!e.is_constant()) throw SchemaError(path, "expected a constant expression");
        return e.eval_real(0.0);
    } catch (const ParseError& e) {
        throw SchemaError(path, e.what());
    } catch (const EvalError& e) {
        throw SchemaError(path, e.what());
    }
}

std::string expression(const json& v, const std::string& path, Slot slot) {
    if (!v.is_string()) throw SchemaError(path, "expected an expression string");
    const std::string s = v.get<std::string>();
    try {
        Expr::parse(s, slot);
    } catch (const ParseError& e) {
        throw SchemaError(path, e.what());
    }
    return s;
}

json number_out(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

ProblemFile ProblemFile::from_json(const json& doc) {
    only_keys(doc, "",
              {"interval", "coefficients", "left_bc", "right_pair", "right_bc_constant", "window", "tolerances",
               "target"});
    ProblemFile f;

    const json& iv = required(doc, "", "interval");
    only_keys(iv, "interval", {"a", "b", "regularity"});
    f.a = number(required(iv, "interval", "a"), "interval.a");
    f.b = number(required(iv, "interval", "b"), "interval.b", true);
    if (!std::isfinite(f.a)) throw SchemaError("interval.a", "must be finite");
    if (!(f.a < f.b)) throw SchemaError("interval", "requires a < b");
    f.regularity = std::isfinite(f.b) ? Regularity::Regular : Regularity::Quasiregular;
    if (iv.contains("regularity")) {
        const json& r = iv.at("regularity");
        if (r == "regular") f.regularity = Regularity::Regular;
        else if (r == "quasiregular") f.regularity = Regularity::Quasiregular;
        else throw SchemaError("interval.regularity", "expected \"regular\" or \"quasiregular\"");
        if (f.regularity == Regularity::Regular && !std::isfinite(f.b))
            throw SchemaError("interval.regularity", "a regular problem needs a finite b");
    }

    const json& co = required(doc, "", "coefficients");
    only_keys(co, "coefficients", {"p", "q", "delta"});
    f.p = expression(required(co, "coefficients", "p"), "coefficients.p", Slot::Coefficient);
    f.q = expression(required(co, "coefficients", "q"), "coefficients.q", Slot::Coefficient);
    f.delta = expression(required(co, "coefficients", "delta"), "coefficients.delta", Slot::Coefficient);

    const json& lb = required(doc, "", "left_bc");
    only_keys(lb, "left_bc", {"B"});
    f.left_angle = number(required(lb, "left_bc", "B"), "left_bc.B");

    const bool has_pair = doc.contains("right_pair"), has_angle = doc.contains("right_bc_constant");
    if (has_pair == has_angle) throw SchemaError("", "exactly one of right_pair and right_bc_constant is required");
    if (has_pair) {
        const json& rp = doc.at("right_pair");
        only_keys(rp, "right_pair", {"C0", "C1"});
        f.right_pair = std::array<std::string, 2>{
            expression(required(rp, "right_pair", "C0"), "right_pair.C0", Slot::Pair),
            expression(required(rp, "right_pair", "C1"), "right_pair.C1", Slot::Pair)};
    } else {
        const json& rc = doc.at("right_bc_constant");
        only_keys(rc, "right_bc_constant", {"B1"});
        f.right_angle = number(required(rc, "right_bc_constant", "B1"), "right_bc_constant.B1");
    }

    if (doc.contains("window")) {
        const json& w = doc.at("window");
        if (!w.is_array() || w.size() != 2) throw SchemaError("window", "expected [lo, hi]");
        f.window = std::array<double, 2>{number(w[0], "window[0]"), number(w[1], "window[1]")};
        if (!((*f.window)[0] < (*f.window)[1])) throw SchemaError("window", "requires lo < hi");
    }

    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        only_keys(t, "tolerances", {"ode_rel", "ode_abs", "quad", "root", "tail"});
        auto get = [&](const char* key, double& slot) {
            if (!t.contains(key)) return;
            slot = number(t.at(key), std::string("tolerances.") + key);
            if (!(slot > 0.0 && slot < 1.0)) throw SchemaError(std::string("tolerances.") + key, "must lie in (0, 1)");
        };
        get("ode_rel", f.tolerances.ode_rel);
        get("ode_abs", f.tolerances.ode_abs);
        get("quad", f.tolerances.quad);
        get("root", f.tolerances.root);
        get("tail", f.tolerances.tail);
    }

    if (doc.contains("target")) {
        const json& t = doc.at("target");
        only_keys(t, "target", {"y", "dy", "f_y"});
        TargetSpec s;
        s.y = expression(required(t, "target", "y"), "target.y", Slot::Coefficient);
        if (t.contains("dy")) s.dy = expression(t.at("dy"), "target.dy", Slot::Coefficient);
        if (t.contains("f_y")) s.f_y = expression(t.at("f_y"), "target.f_y", Slot::Coefficient);
        f.target = s;
    }
    return f;
}

ProblemFile ProblemFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot read " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return from_json(doc);
}

nlohmann::ordered_json ProblemFile::to_json() const {
    nlohmann::ordered_json j;
    j["interval"] = {{"a", a},
                     {"b", number_out(b)},
                     {"regularity", regularity == Regularity::Regular ? "regular" : "quasiregular"}};
    j["coefficients"] = {{"p", p}, {"q", q}, {"delta", delta}};
    j["left_bc"] = {{"B", left_angle}};
    if (right_pair) j["right_pair"] = {{"C0", (*right_pair)[0]}, {"C1", (*right_pair)[1]}};
    if (right_angle) j["right_bc_constant"] = {{"B1", *right_angle}};
    if (window) j["window"] = {(*window)[0], (*window)[1]};
    j["tolerances"] = {{"ode_rel", tolerances.ode_rel},
                       {"ode_abs", tolerances.ode_abs},
                       {"quad", tolerances.quad},
                       {"root", tolerances.root},
                       {"tail", tolerances.tail}};
    if (target) {
        nlohmann::ordered_json t = {{"y", target->y}};
        if (!target->dy.empty()) t["dy"] = target->dy;
        if (!target->f_y.empty()) t["f_y"] = target->f_y;
        j["target"] = t;
    }
    return j;
}

Problem ProblemFile::problem() const {
    IntegratorOptions io;
    io.rel_tol = tolerances.ode_rel;
    io.abs_tol = tolerances.ode_abs;
    QuadratureOptions qo;
    qo.rel_tol = tolerances.quad;
    qo.abs_tol = tolerances.quad / 100.0;
    TailPolicy tp;
    tp.tail_tol = tolerances.tail;
    return Problem(a, b, regularity,
                   Coefficients::from_expressions(Expr::parse(p, Slot::Coefficient), Expr::parse(q, Slot::Coefficient),
                                                  Expr::parse(delta, Slot::Coefficient)),
                   left_angle, io, qo, tp);
}

EntirePair ProblemFile::pair() const {
    if (right_pair) return EntirePair::from_strings((*right_pair)[0], (*right_pair)[1]);
    return EntirePair::constant_angle(*right_angle);
}

CharacteristicPair ProblemFile::characteristic() const { return CharacteristicPair::automatic(problem(), pair()); }

}  // namespace sturmnev
