#include "sturmnev/commands.hpp"

#include "sturmnev/expansion.hpp"
#include "sturmnev/oracle.hpp"
#include "sturmnev/problem_file.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace sturmnev {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double oracle_tolerance = 1e-3;

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return exit_schema;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failed;
    }
}

std::array<double, 2> window_for(const ProblemFile& f, const CommandOptions& o) {
    if (o.window) return *o.window;
    if (f.window) return *f.window;
    throw SchemaError("window", "no window in the file and no --window given");
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson check_json(const ConditionCheck& c) {
    return {{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}, {"at", complex_json(c.at)}};
}

SpectrumOptions spectrum_options(const ProblemFile& f, const CommandOptions& o) {
    SpectrumOptions s;
    s.root_tol = f.tolerances.root;
    s.threads = o.threads;
    return s;
}

TargetFunction target_for(const ProblemFile& f, const Problem& pr) {
    if (!f.target) throw ExpansionError("the problem file has no target function");
    return TargetFunction::from_strings(pr, f.target->y, f.target->dy, f.target->f_y);
}

std::vector<std::size_t> ks_for(const CommandOptions& o, std::size_t available, std::vector<std::size_t> fallback) {
    std::vector<std::size_t> ks = o.Ks;
    if (ks.empty()) {
        for (std::size_t k : fallback)
            if (k <= available) ks.push_back(k);
        if (ks.empty() || ks.back() != available) ks.push_back(available);
    }
    for (std::size_t k : ks)
        if (k > available)
            throw ExpansionError("K = " + std::to_string(k) + " exceeds the " + std::to_string(available) +
                                 " eigenvalues found in the window");
    return ks;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_series_csv(const std::string& dir, const std::string& name, const std::vector<double>& grid,
                      const TargetFunction& y, const std::vector<ExpansionTerm>& terms, std::size_t K) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(std::filesystem::path(dir) / name);
    if (!csv) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
    csv << "x,y,S_" << K;
    for (std::size_t k = 0; k < K; ++k) csv << ",term_" << k;
    csv << "\n";
    std::vector<double> values(K);
    for (double x : grid) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            values[k] = terms[k].value(x);
            s += values[k];
        }
        csv << fmt(x) << ',' << fmt(y.y(x)) << ',' << fmt(s);
        for (double v : values) csv << ',' << fmt(v);
        csv << "\n";
    }
}

}  // namespace

std::array<double, 2> parse_window(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw SchemaError("--window", "expected lo:hi");
    auto num = [&](const std::string& part) {
        try {
            return Expr::parse(part).eval_real(0.0);
        } catch (const std::exception& e) {
            throw SchemaError("--window", e.what());
        }
    };
    const std::array<double, 2> w{num(s.substr(0, colon)), num(s.substr(colon + 1))};
    if (!(w[0] < w[1])) throw SchemaError("--window", "requires lo < hi");
    return w;
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        long v = -1;
        try {
            v = std::stol(item, &used);
        } catch (const std::exception&) {
        }
        if (v < 0 || used != item.size()) throw SchemaError("--K", "expected a comma-separated list of counts");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw SchemaError("--K", "empty list");
    return out;
}

int cmd_validate(const std::string& file, const CommandOptions&, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemFile f = ProblemFile::load(file);
        ojson report;
        bool passed = true;

        const Coefficients coeffs =
            Coefficients::from_expressions(Expr::parse(f.p, Slot::Coefficient), Expr::parse(f.q, Slot::Coefficient),
                                           Expr::parse(f.delta, Slot::Coefficient));
        double check_end = f.b;
        if (!std::isfinite(f.b)) {
            try {
                check_end = f.problem().truncation();
            } catch (const ProblemError& e) {
                report["truncation_error"] = e.what();
                passed = false;
                check_end = f.a + 1.0;
            }
        }
        const CoefficientReport cr = check_coefficients(coeffs, f.a, check_end);
        report["coefficients"] = {{"ok", cr.ok()},
                                  {"finite", cr.finite},
                                  {"p_positive", cr.p_positive},
                                  {"weight_nonnegative", cr.weight_nonnegative},
                                  {"weight_nontrivial", cr.weight_nontrivial},
                                  {"positive_measure", cr.positive_measure},
                                  {"messages", cr.messages}};
        passed = passed && cr.ok();

        const EntirePair pair = f.pair();
        const ValidationReport vr = validate_pair(pair);
        report["pair"] = {{"C0", pair.c0_source()},
                          {"C1", pair.c1_source()},
                          {"ok", vr.passed()},
                          {"conditions", ojson::array({check_json(vr.no_common_zeros), check_json(vr.nevanlinna_sign),
                                                       check_json(vr.symmetry), check_json(vr.realness)})},
                          {"real_on_axis", vr.real_on_axis},
                          {"non_entire_hint", vr.non_entire_hint},
                          {"failures", vr.failures()}};
        passed = passed && vr.passed();

        try {
            const CaseClassification c = classify_infinity(pair);
            ojson cj = {{"case", to_string(c.kind)}, {"b_inf", c.b_inf}};
            cj["dhat_inf"] = std::isinf(c.dhat_inf) ? ojson("inf") : ojson(c.dhat_inf);
            if (c.d_inf) cj["d_inf"] = *c.d_inf;
            report["classification"] = cj;
            report["eta"] = eta_relation(c).describe();
        } catch (const ClassificationError& e) {
            report["classification"] = {{"error", e.what()}};
            passed = false;
        }
        report["weight_nontrivial"] = cr.weight_nontrivial;
        report["passed"] = passed;
        out << report.dump(2) << "\n";
        return passed ? exit_ok : exit_failed;
    });
}

int cmd_spectrum(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemFile f = ProblemFile::load(file);
        const auto w = window_for(f, opts);
        const CharacteristicPair cp = f.characteristic();
        const DiscreteSpectralFunction dsf = find_eigenvalues(cp, w[0], w[1], spectrum_options(f, opts));
        ojson list = ojson::array();
        for (const auto& e : dsf.eigenvalues) list.push_back({{"t", e.t}, {"xi", e.residue_xi}});
        out << list.dump(2) << "\n";
        return exit_ok;
    });
}

int cmd_expand(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemFile f = ProblemFile::load(file);
        const auto w = window_for(f, opts);
        const CharacteristicPair cp = f.characteristic();
        const Problem& pr = cp.problem();
        const TargetFunction y = target_for(f, pr);
        const DiscreteSpectralFunction dsf = find_eigenvalues(cp, w[0], w[1], spectrum_options(f, opts));
        const auto terms = expansion_terms(pr, dsf, y, opts.threads);
        const auto ks = ks_for(opts, terms.size(), {});

        const L2Report l2 = l2_report(pr, y, terms, ks);
        UniformOptions uo;
        uo.check_eligibility = false;
        uo.grid_points = opts.grid.value_or(uo.grid_points);
        const UniformReport ur = uniform_report(cp, {}, y, terms, ks, uo);

        ojson report;
        report["window"] = {w[0], w[1]};
        report["eigenvalue_count"] = terms.size();
        ojson tj = ojson::array();
        for (const auto& t : terms)
            tj.push_back({{"k", t.k}, {"t", t.t}, {"xi", t.xi}, {"yhat", t.yhat}, {"bhat", t.coefficient()}});
        report["terms"] = tj;
        report["norm_squared"] = l2.norm_squared;
        ojson rows = ojson::array();
        for (std::size_t i = 0; i < ks.size(); ++i)
            rows.push_back({{"K", ks[i]},
                            {"l2_residual", l2.rows[i].residual},
                            {"parseval_sum", l2.rows[i].parseval_sum},
                            {"parseval_defect", l2.rows[i].parseval_defect},
                            {"sup_residual", ur.rows[i].sup_residual}});
        report["residuals"] = rows;
        report["parseval_defect"] = l2.rows.back().parseval_defect;
        if (!opts.out_dir.empty()) {
            const std::size_t kmax = *std::max_element(ks.begin(), ks.end());
            write_series_csv(opts.out_dir, "expansion.csv", ur.grid, y, terms, kmax);
            report["csv"] = (std::filesystem::path(opts.out_dir) / "expansion.csv").string();
        }
        out << report.dump(2) << "\n";
        return exit_ok;
    });
}

int cmd_converge(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemFile f = ProblemFile::load(file);
        const auto w = window_for(f, opts);
        const CharacteristicPair cp = f.characteristic();
        const Problem& pr = cp.problem();
        const TargetFunction y = target_for(f, pr);
        const DiscreteSpectralFunction dsf = find_eigenvalues(cp, w[0], w[1], spectrum_options(f, opts));
        const auto terms = expansion_terms(pr, dsf, y, opts.threads);
        const auto ks = ks_for(opts, terms.size(), {1, 5, 10, 25, 50, 100});

        ojson report;
        report["window"] = {w[0], w[1]};
        report["eigenvalue_count"] = terms.size();

        UniformOptions uo;
        uo.grid_points = opts.grid.value_or(uo.grid_points);
        uo.allow_finite_difference = true;
        std::optional<EtaRelation> eta;
        try {
            eta = eta_relation(classify_infinity(cp.pair()));
        } catch (const ClassificationError& e) {
            report["classification_error"] = e.what();
            uo.check_eligibility = false;
        }
        const UniformReport ur = uniform_report(cp, eta.value_or(EtaRelation{}), y, terms, ks, uo);
        const L2Report l2 = l2_report(pr, y, terms, ks);

        if (eta) {
            const Eligibility& e = ur.eligibility;
            report["eligibility"] = {{"left_ok", e.left_ok},
                                     {"left_defect", e.left_defect},
                                     {"right_condition", e.right_condition},
                                     {"right_ok", e.right_ok},
                                     {"right_defect", e.right_defect},
                                     {"membership_ok", e.membership_ok},
                                     {"membership_residual", e.membership_residual},
                                     {"finite_difference", e.finite_difference},
                                     {"eligible", e.eligible()}};
        }
        report["verdict"] = ur.guaranteed ? "uniform convergence guaranteed" : "no uniform-convergence guarantee";
        ojson rows = ojson::array();
        for (std::size_t i = 0; i < ks.size(); ++i) {
            ojson r = {{"K", ks[i]},
                       {"l2_residual", l2.rows[i].residual},
                       {"parseval_defect", l2.rows[i].parseval_defect},
                       {"sup_residual", ur.rows[i].sup_residual}};
            const double q = ur.rows[i].sup_quasi_residual;
            r["sup_quasi_residual"] = std::isnan(q) ? ojson(nullptr) : ojson(q);
            rows.push_back(r);
        }
        report["rows"] = rows;
        out << report.dump(2) << "\n";
        return exit_ok;
    });
}

int cmd_oracle_compare(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ProblemFile f = ProblemFile::load(file);
        const auto w = window_for(f, opts);
        const CharacteristicPair cp = f.characteristic();
        const int n = opts.grid.value_or(4096);
        const Pencil pencil = discretize(cp, n);
        const auto oracle = pencil_eigenvalues(pencil, w[0] - oracle_tolerance, w[1] + oracle_tolerance);
        const DiscreteSpectralFunction dsf = find_eigenvalues(cp, w[0], w[1], spectrum_options(f, opts));
        std::vector<double> engine;
        for (const auto& e : dsf.eigenvalues) engine.push_back(e.t);
        const MatchReport m = match_eigenvalues(engine, oracle, w[0], w[1], oracle_tolerance);

        ojson report;
        report["n"] = n;
        report["window"] = {w[0], w[1]};
        report["tolerance"] = oracle_tolerance;
        ojson pairs = ojson::array();
        for (const auto& p : m.pairs) pairs.push_back({{"engine", p.engine}, {"oracle", p.oracle}, {"gap", p.gap}});
        report["matches"] = pairs;
        report["unmatched_engine"] = m.unmatched_engine;
        report["unmatched_oracle"] = m.unmatched_oracle;
        report["max_gap"] = m.max_gap;
        report["passed"] = m.ok(oracle_tolerance);
        out << report.dump(2) << "\n";
        return m.ok(oracle_tolerance) ? exit_ok : exit_failed;
    });
}

}  // namespace sturmnev
