#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace swefinn {

/// Shortest decimal that parses back to the identical double.
std::string format_double(double value);

/// Strict parse of a whole string; throws ConfigError on trailing junk.
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

std::string_view trim(std::string_view text);

} // namespace swefinn
