#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace uwbfp::text {

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);

/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Whole-string parse; throws Error(Parse) naming `what` on failure.
double parse_double(std::string_view field, std::string_view what = "number");
long long parse_integer(std::string_view field, std::string_view what = "integer");

std::string_view trim(std::string_view s) noexcept;

/// Splits on `sep` without trimming; an empty input yields one empty field.
std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits into lines, dropping a trailing '\r' from each.
std::vector<std::string_view> lines(std::string_view s);

std::string read_file(const std::string& path);
/// Writes atomically enough for batch use: truncates, writes, checks the stream.
void write_file(const std::string& path, std::string_view contents);

}  // namespace uwbfp::text
