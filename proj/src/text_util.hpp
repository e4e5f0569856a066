#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spectrasort::detail {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Whole-field decimal parse ('.' decimal point only). Leading '+' allowed.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// printf("%.{digits}g") equivalent through std::to_chars.
std::string format_general(double v, int digits);
/// Shortest text that reads back to the same double.
std::string format_shortest(double v);
/// printf("%.{decimals}f") equivalent.
std::string format_fixed(double v, int decimals);

/// Strip a trailing '\r' (CRLF input).
inline std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace spectrasort::detail
