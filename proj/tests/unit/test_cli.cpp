#include "doctest.h"
#include "sturmnev/commands.hpp"
#include "sturmnev/problem_file.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

using namespace sturmnev;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("sturmnev_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& body) const {
        const fs::path path = dir / name;
        std::ofstream(path) << body;
        return path.string();
    }
};

json base_doc() {
    return json::parse(R"({
        "interval": {"a": 0, "b": 1},
        "coefficients": {"p": "1", "q": "0", "delta": "1"},
        "left_bc": {"B": "pi/2"},
        "right_pair": {"C0": "lambda", "C1": "-1"},
        "window": [-1, 120]
    })");
}

struct Run {
    int code;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

using Command = int (*)(const std::string&, const CommandOptions&, std::ostream&, std::ostream&);

Run run(Command cmd, const std::string& file, const CommandOptions& opts = {}) {
    std::ostringstream out, err;
    const int code = cmd(file, opts, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("schema errors exit with 2") {
    Scratch s;
    CHECK(run(cmd_validate, (s.dir / "missing.json").string()).code == exit_schema);
    CHECK(run(cmd_validate, s.write("bad.json", "{not json")).code == exit_schema);

    json unknown = base_doc();
    unknown["coefficients"]["r"] = "1";
    const Run r = run(cmd_validate, s.write("unknown.json", unknown.dump()));
    CHECK(r.code == exit_schema);
    CHECK(r.err.find("coefficients.r") != std::string::npos);

    json both = base_doc();
    both["right_bc_constant"] = {{"B1", 0}};
    CHECK(run(cmd_spectrum, s.write("both.json", both.dump())).code == exit_schema);

    json bad_expr = base_doc();
    bad_expr["coefficients"]["p"] = "1 +";
    CHECK(run(cmd_spectrum, s.write("expr.json", bad_expr.dump())).code == exit_schema);

    json no_window = base_doc();
    no_window.erase("window");
    CHECK(run(cmd_spectrum, s.write("nowin.json", no_window.dump())).code == exit_schema);
}

TEST_CASE("validate reports the pair, its case and the eta relation") {
    Scratch s;
    const Run r = run(cmd_validate, s.write("ok.json", base_doc().dump()));
    REQUIRE(r.code == exit_ok);
    const json j = r.doc();
    CHECK(j["passed"] == true);
    CHECK(j["classification"]["case"] == "Case1");
    CHECK(j["eta"] == "Gamma0b y = 0");
    CHECK(j["weight_nontrivial"] == true);
}

TEST_CASE("validate fails on a trivial weight") {
    Scratch s;
    json doc = base_doc();
    doc["coefficients"]["delta"] = "0";
    const Run r = run(cmd_validate, s.write("zero.json", doc.dump()));
    CHECK(r.code == exit_failed);
    const json j = r.doc();
    CHECK(j["weight_nontrivial"] == false);
    CHECK(j["passed"] == false);
}

TEST_CASE("validate names the violated inequality for an anti-oriented pair") {
    Scratch s;
    json doc = base_doc();
    doc["right_pair"] = {{"C0", "1"}, {"C1", "-lambda"}};
    const Run r = run(cmd_validate, s.write("anti.json", doc.dump()));
    CHECK(r.code == exit_failed);
    const json j = r.doc();
    CHECK(j["pair"]["ok"] == false);
    bool named = false;
    for (const auto& f : j["pair"]["failures"]) named = named || f.get<std::string>().find("Im(") != std::string::npos;
    CHECK(named);
}

TEST_CASE("spectrum lists eigenvalues with residues") {
    Scratch s;
    const std::string file = s.write("ok.json", base_doc().dump());
    const Run r = run(cmd_spectrum, file);
    REQUIRE(r.code == exit_ok);
    const json j = r.doc();
    REQUIRE(j.size() == 4);
    CHECK(j[0]["t"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(j[0]["xi"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    for (const auto& row : j) CHECK(row["xi"].get<double>() > 0.0);

    CommandOptions empty;
    empty.window = std::array<double, 2>{-10.0, -5.0};
    const Run e = run(cmd_spectrum, file, empty);
    CHECK(e.code == exit_ok);
    CHECK(e.doc().empty());
}

TEST_CASE("spectrum of the constant Dirichlet variant") {
    Scratch s;
    json doc = base_doc();
    doc.erase("right_pair");
    doc["right_bc_constant"] = {{"B1", 0}};
    doc["window"] = {-1, 250};
    const Run r = run(cmd_spectrum, s.write("dir.json", doc.dump()));
    REQUIRE(r.code == exit_ok);
    const json j = r.doc();
    REQUIRE(j.size() == 5);
    for (int k = 1; k <= 5; ++k) {
        const double s_k = (k - 0.5) * std::numbers::pi;
        CHECK(j[k - 1]["t"].get<double>() == doctest::Approx(s_k * s_k).epsilon(1e-9));
        CHECK(j[k - 1]["xi"].get<double>() == doctest::Approx(2.0).epsilon(1e-8));
    }
}

TEST_CASE("expand writes the partial sums and their terms") {
    Scratch s;
    json doc = base_doc();
    doc["target"] = {{"y", "1"}, {"dy", "0"}, {"f_y", "0"}};
    const std::string file = s.write("one.json", doc.dump());

    CommandOptions opts;
    opts.Ks = {1};
    opts.out_dir = (s.dir / "out").string();
    opts.grid = 65;
    const Run r = run(cmd_expand, file, opts);
    REQUIRE(r.code == exit_ok);
    CHECK(r.doc()["terms"][0]["bhat"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));

    std::ifstream csv(s.dir / "out" / "expansion.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,y,S_1,term_0");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream ls(line);
        std::string x, y, s1;
        std::getline(ls, x, ',');
        std::getline(ls, y, ',');
        std::getline(ls, s1, ',');
        CHECK(std::stod(s1) == doctest::Approx(0.5).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows >= 65);

    opts.Ks = {100};
    const Run too_many = run(cmd_expand, file, opts);
    CHECK(too_many.code == exit_failed);
    CHECK(too_many.err.find("exceeds") != std::string::npos);
}

TEST_CASE("expand of the zero target is zero") {
    Scratch s;
    json doc = base_doc();
    doc["target"] = {{"y", "0"}};
    CommandOptions opts;
    opts.out_dir = (s.dir / "zero").string();
    opts.grid = 33;
    REQUIRE(run(cmd_expand, s.write("zero.json", doc.dump()), opts).code == exit_ok);
    std::ifstream csv(s.dir / "zero" / "expansion.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        while (std::getline(ls, cell, ',')) CHECK(std::stod(cell) == 0.0);
    }
}

TEST_CASE("expand requires a target") {
    Scratch s;
    const Run r = run(cmd_expand, s.write("ok.json", base_doc().dump()));
    CHECK(r.code == exit_failed);
    CHECK(r.err.find("target") != std::string::npos);
}

TEST_CASE("converge reports eligibility and a verdict") {
    Scratch s;
    json doc = base_doc();
    doc["window"] = {-1, 500};
    doc["target"] = {{"y", "cos(3*pi*x/2)"},
                     {"dy", "-3*pi/2*sin(3*pi*x/2)"},
                     {"f_y", "(3*pi/2)^2*cos(3*pi*x/2)"}};
    CommandOptions opts;
    opts.grid = 257;
    const Run r = run(cmd_converge, s.write("cos.json", doc.dump()), opts);
    REQUIRE(r.code == exit_ok);
    const json j = r.doc();
    CHECK(j["eligibility"]["eligible"] == true);
    CHECK(j["verdict"] == "uniform convergence guaranteed");

    doc["target"] = {{"y", "1"}};
    const Run one = run(cmd_converge, s.write("one.json", doc.dump()), opts);
    REQUIRE(one.code == exit_ok);
    const json k = one.doc();
    CHECK(k["eligibility"]["eligible"] == false);
    CHECK(k["eligibility"]["finite_difference"] == true);
    CHECK(k["verdict"] == "no uniform-convergence guarantee");
}

TEST_CASE("oracle-compare matches the finite-difference pencil") {
    Scratch s;
    json doc = base_doc();
    doc["window"] = {-1, 400};
    const Run r = run(cmd_oracle_compare, s.write("ok.json", doc.dump()));
    REQUIRE(r.code == exit_ok);
    const json j = r.doc();
    CHECK(j["passed"] == true);
    CHECK(j["max_gap"].get<double>() < 1e-3);
    CHECK(j["matches"].size() == 7);

    doc.erase("right_pair");
    doc["right_bc_constant"] = {{"B1", 0}};
    CHECK(run(cmd_oracle_compare, s.write("const.json", doc.dump())).code == exit_ok);

    doc.erase("right_bc_constant");
    doc["right_pair"] = {{"C0", "sin(lambda)"}, {"C1", "-1"}};
    const Run scope = run(cmd_oracle_compare, s.write("sin.json", doc.dump()));
    CHECK(scope.code == exit_failed);
    CHECK(scope.err.find("oracle scope") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
    Scratch s;
    json doc = base_doc();
    doc["target"] = {{"y", "x"}};
    const std::string file = s.write("x.json", doc.dump());
    CommandOptions a, b;
    a.out_dir = (s.dir / "a").string();
    b.out_dir = (s.dir / "b").string();
    a.grid = b.grid = 129;
    b.threads = 1;
    const Run ra = run(cmd_expand, file, a), rb = run(cmd_expand, file, b);
    REQUIRE(ra.code == exit_ok);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(s.dir / "a" / "expansion.csv") == slurp(s.dir / "b" / "expansion.csv"));
    json ja = ra.doc(), jb = rb.doc();
    ja.erase("csv");
    jb.erase("csv");
    CHECK(ja == jb);
    CHECK(run(cmd_spectrum, file).out == run(cmd_spectrum, file).out);
}

TEST_CASE("a generated problem file parses back unchanged") {
    ProblemFile f;
    f.a = 0.0;
    f.b = ProblemFile{}.b;
    f.p = "1 + x";
    f.q = "x^2";
    f.delta = "indicator(0.5, 1)";
    f.left_angle = 0.25;
    f.right_pair = std::array<std::string, 2>{"2*lambda + 1", "-1"};
    f.window = std::array<double, 2>{-3.0, 40.0};
    f.tolerances.root = 1e-11;
    f.target = TargetSpec{"x", "1", "0"};

    const auto j = f.to_json();
    const ProblemFile g = ProblemFile::from_json(json::parse(j.dump()));
    CHECK(g.to_json() == j);

    ProblemFile h;
    h.b = Problem::infinity;
    h.regularity = Regularity::Quasiregular;
    h.delta = "exp(-x)";
    h.right_angle = 0.0;
    const ProblemFile k = ProblemFile::from_json(json::parse(h.to_json().dump()));
    CHECK(std::isinf(k.b));
    CHECK(k.regularity == Regularity::Quasiregular);
    CHECK(k.right_angle == 0.0);
}

TEST_CASE("window and K list parsing") {
    const auto w = parse_window("-1:pi^2");
    CHECK(w[0] == -1.0);
    CHECK(w[1] == doctest::Approx(std::numbers::pi * std::numbers::pi));
    CHECK_THROWS_AS(parse_window("5:1"), SchemaError);
    CHECK_THROWS_AS(parse_window("5"), SchemaError);
    CHECK(parse_k_list("1,5,10") == std::vector<std::size_t>{1, 5, 10});
    CHECK_THROWS_AS(parse_k_list("1,x"), SchemaError);
    CHECK_THROWS_AS(parse_k_list("-3"), SchemaError);
}
