#pragma once

#include "sturmnev/characteristic.hpp"

#include "json.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace sturmnev {

/// Malformed problem file; `path` names the offending key ("coefficients.p").
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& message);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Defaults used when a key is absent.
struct Tolerances {
    double ode_rel = 1e-10;  // DOPRI5 relative tolerance
    double ode_abs = 1e-12;  // DOPRI5 absolute tolerance
    double quad = 1e-11;     // quadrature relative tolerance (absolute: quad / 100)
    double root = 1e-10;     // eigenvalue refinement, relative to max(1, |t|)
    double tail = 1e-10;     // relative weighted mass allowed beyond the truncation point
};

struct TargetSpec {
    std::string y, dy, f_y;  // dy and f_y may be empty
};

/// In-memory form of a problem file:
///
///   {
///     "interval": {"a": 0, "b": 1, "regularity": "regular"},
///     "coefficients": {"p": "1", "q": "0", "delta": "1"},
///     "left_bc": {"B": "pi/2"},
///     "right_pair": {"C0": "lambda", "C1": "-1"},      (or "right_bc_constant": {"B1": 0})
///     "window": [-1, 500],
///     "tolerances": {"ode_rel": 1e-10, ...},
///     "target": {"y": "1", "dy": "0", "f_y": "0"}
///   }
///
/// Numbers may be written as constant expressions ("pi/2"); b may be "inf".
/// regularity defaults to "regular" for finite b and "quasiregular" otherwise.
struct ProblemFile {
    double a = 0.0, b = 1.0;
    Regularity regularity = Regularity::Regular;
    std::string p = "1", q = "0", delta = "1";
    double left_angle = 0.0;
    std::optional<std::array<std::string, 2>> right_pair;
    std::optional<double> right_angle;
    std::optional<std::array<double, 2>> window;
    Tolerances tolerances;
    std::optional<TargetSpec> target;

    static ProblemFile from_json(const nlohmann::json& doc);
    static ProblemFile load(const std::string& path);
    nlohmann::ordered_json to_json() const;

    Problem problem() const;
    EntirePair pair() const;
    CharacteristicPair characteristic() const;
};

}  // namespace sturmnev
