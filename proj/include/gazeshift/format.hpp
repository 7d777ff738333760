#pragma once

#include <string>
#include <string_view>

namespace gazeshift {

/// Fixed-point decimal rendering, independent of the global locale.
std::string format_fixed(double value, int precision);

/// Shortest representation that parses back to the identical double.
std::string format_roundtrip(double value);

/// Locale-independent strict parse of a whole field; surrounding blanks allowed.
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, long long& out);

std::string_view trim(std::string_view text);

}  // namespace gazeshift
