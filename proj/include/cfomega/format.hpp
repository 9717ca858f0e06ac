#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace cfomega {

/// Shortest round-trip decimal form, independent of locale. Non-finite
/// values print as "inf", "-inf" and "nan".
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace cfomega
