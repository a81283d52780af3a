#pragma once

// Small text helpers shared by the descriptor, recipe and CSV readers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radialkit {

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Whole-string parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

/// Shortest representation that round-trips exactly.
std::string format_double(double value);
/// printf("%.*g") with the given number of significant digits.
std::string format_significant(double value, int digits);

}  // namespace radialkit
