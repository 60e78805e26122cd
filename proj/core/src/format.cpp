#include "swefinn/format.hpp"

#include "swefinn/errors.hpp"

#include <charconv>
#include <system_error>

namespace swefinn {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
T parse_number(std::string_view text, const char *what) {
  const std::string_view t = trim(text);
  T value{};
  const char *first = t.data();
  const char *last = t.data() + t.size();
  if (!t.empty() && t.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (t.empty() || res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("cannot parse '" + std::string(text) + "' as " + what);
  }
  return value;
}

} // namespace

double parse_double(std::string_view text) { return parse_number<double>(text, "a real number"); }
std::int64_t parse_int(std::string_view text) { return parse_number<std::int64_t>(text, "an integer"); }
std::uint64_t parse_uint(std::string_view text) {
  return parse_number<std::uint64_t>(text, "a non-negative integer");
}

std::string_view trim(std::string_view text) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

} // namespace swefinn
