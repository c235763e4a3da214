#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include "moseac/errors.hpp"

namespace moseac {

// Shortest representation that round-trips exactly through parse_double.
// Used everywhere a double lands in a text file (metrics CSV, manifests),
// so that values read back compare bit-for-bit with the values written.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context = {}) {
  double out = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw parse_error("not a number: '" + std::string(s) + "'" +
                      (context.empty() ? "" : " (" + context + ")"));
  }
  return out;
}

inline long parse_long(std::string_view s, const std::string& context = {}) {
  long out = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    // allow scientific notation for counts (3e6 and friends)
    double d = parse_double(s, context);
    double r = std::round(d);
    if (!std::isfinite(d) || std::abs(d - r) > 1e-9 || std::abs(d) > 9e15) {
      throw parse_error("not an integer: '" + std::string(s) + "'" +
                        (context.empty() ? "" : " (" + context + ")"));
    }
    return static_cast<long>(r);
  }
  return out;
}

inline bool all_finite(const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

}  // namespace moseac
