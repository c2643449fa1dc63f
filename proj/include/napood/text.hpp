#pragma once

#include <string>
#include <string_view>

namespace napood {

/// Shortest-or-fixed-precision decimal rendering. With the default 17
/// significant digits every finite double round-trips exactly.
std::string format_double(double value, int significant_digits = 17);

/// Shortest decimal string that parses back to the same double.
std::string format_double_shortest(double value);

/// Strict decimal parse of the whole string (surrounding spaces allowed).
/// Throws FormatError on anything else.
double parse_double(std::string_view text);

}  // namespace napood
