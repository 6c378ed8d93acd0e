#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace irsmec::detail {

/// Shortest round-trip decimal, locale independent; "inf"/"nan" for non-finite values.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace irsmec::detail
