#pragma once

#include <string>

namespace pradic {

/// Scientific notation with 4 significant digits and an unpadded signed
/// exponent: 1.270E-6, 2.095E-5, 0.000E+0. This is the fixed style for all
/// report numbers; full precision is kept internally.
std::string format_sci4(double value);

/// Percentages with two decimals: "95.31", "-70.40".
std::string format_percent(double value);

/// Six significant digits, trailing zeros kept: "0.300000", "0.0454314".
std::string format_sig6(double value);

}  // namespace pradic
