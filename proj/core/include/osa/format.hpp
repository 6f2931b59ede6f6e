#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace osa {

/// Shortest text that keeps 17 significant digits ("%.17g"), with "inf",
/// "-inf" and "nan" for non-finite values.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace osa
