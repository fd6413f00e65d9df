#pragma once

#include "sturmnev/characteristic.hpp"

#include <string>

namespace sturmnev::testing {

inline Problem make_problem(double a, double b, Regularity reg, const std::string& p, const std::string& q,
                            const std::string& weight, double left_angle, TailPolicy tail = {}) {
    return Problem(a, b, reg,
                   Coefficients::from_expressions(Expr::parse(p, Slot::Coefficient), Expr::parse(q, Slot::Coefficient),
                                                  Expr::parse(weight, Slot::Coefficient)),
                   left_angle, {}, {}, tail);
}

/// -y'' = lambda y on [0, 1], y'(0) = 0, lambda y(1) - y'(1) = 0.
inline CharacteristicPair eigen_dependent_bc() {
    return CharacteristicPair::automatic(
        make_problem(0.0, 1.0, Regularity::Regular, "1", "0", "1", 1.5707963267948966),
        EntirePair::from_strings("lambda", "-1"));
}

}  // namespace sturmnev::testing
