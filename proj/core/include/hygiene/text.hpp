#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hygiene::text {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_real(double value);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

std::optional<double> parse_real(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

std::string_view trim(std::string_view s);

/// Splits on `sep` without quoting rules; fields are trimmed.
std::vector<std::string_view> split(std::string_view line, char sep = ',');

}  // namespace hygiene::text
