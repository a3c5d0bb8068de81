#pragma once

#include <string>
#include <string_view>

namespace rwcscope {

/// Shortest decimal text that parses back to exactly `value`. Integral values
/// keep a trailing ".0" so columns read unambiguously as reals ("1.0", "0.0").
std::string format_real(double value);

/// Fixed-point text with `decimals` digits after the point ("12.50").
std::string format_fixed(double value, int decimals);

/// Parses text produced by format_real (or any decimal/exponent form).
/// Throws Error(InvalidArgument) on malformed input.
double parse_real(const std::string& text);

/// CSV field, quoted only when it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

}  // namespace rwcscope
