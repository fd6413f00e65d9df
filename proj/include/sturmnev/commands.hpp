#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sturmnev {

struct CommandOptions {
    std::optional<std::array<double, 2>> window;  // overrides the file's window
    std::vector<std::size_t> Ks;                  // empty: command default
    std::string out_dir;                          // CSV destination; empty: no CSV
    std::optional<int> grid;                      // report grid points, or pencil intervals for oracle-compare
    unsigned threads = 0;
};

/// Exit codes shared by all commands.
enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_schema = 2 };

// JSON goes to `out`, diagnostics to `err`.
int cmd_validate(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_spectrum(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_expand(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_converge(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle_compare(const std::string& file, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// "lo:hi"
std::array<double, 2> parse_window(const std::string& s);
/// "1,5,10"
std::vector<std::size_t> parse_k_list(const std::string& s);

}  // namespace sturmnev
