#include "sturmnev/commands.hpp"
#include "sturmnev/problem_file.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace sturmnev;
    CLI::App app{"Sturm-Liouville problems with eigenparameter-dependent boundary conditions"};
    app.require_subcommand(1);

    std::string file, window, ks, out_dir;
    int grid = 0;
    unsigned threads = 0;

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const std::string&, const CommandOptions&, std::ostream&, std::ostream&);
    };
    const Command commands[] = {
        {"validate", "check coefficients and the boundary pair, classify the pair at infinity", cmd_validate},
        {"spectrum", "eigenvalues and residues in the window as JSON", cmd_spectrum},
        {"expand", "Fourier coefficients and partial sums of the target (CSV with --out)", cmd_expand},
        {"converge", "weighted L2 and sup-norm residuals with the uniform-convergence eligibility check",
         cmd_converge},
        {"oracle-compare", "match eigenvalues against a finite-difference pencil (--grid sets its size)",
         cmd_oracle_compare},
    };
    const Command* chosen = nullptr;
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("file", file, "problem file (JSON)")->required();
        sub->add_option("--window", window, "eigenvalue window lo:hi (overrides the file)");
        sub->add_option("--K", ks, "comma-separated list of partial-sum sizes");
        sub->add_option("--out", out_dir, "directory for CSV output");
        sub->add_option("--grid", grid, "report grid points, or pencil intervals for oracle-compare")
            ->check(CLI::PositiveNumber);
        sub->add_option("--threads", threads, "worker threads (0: all cores)");
        sub->callback([&chosen, &c] { chosen = &c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_schema;
    }

    CommandOptions opts;
    opts.out_dir = out_dir;
    opts.threads = threads;
    if (grid > 0) opts.grid = grid;
    try {
        if (!window.empty()) opts.window = parse_window(window);
        if (!ks.empty()) opts.Ks = parse_k_list(ks);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return exit_schema;
    }
    return chosen->run(file, opts, std::cout, std::cerr);
}
