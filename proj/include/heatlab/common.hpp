#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace heatlab {

/// Invalid user input: bad files, bad flags, violated preconditions.
/// The CLI maps this to exit code 1.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested tolerance or resolution could not be certified.
/// The CLI maps this to exit code 2.
struct tolerance_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A value with a certified one-sided error bound: truth lies in
/// [value - bound, value + bound] unless a caller documents otherwise.
struct ValueWithBound {
  double value = 0.0;
  double bound = 0.0;
};

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

/// Locale-free exact parse; throws input_error on trailing garbage.
inline double parse_double(std::string_view s) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw input_error("malformed number: '" + std::string(s) + "'");
  return x;
}

}  // namespace heatlab
