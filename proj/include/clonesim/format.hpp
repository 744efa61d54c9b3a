// Shortest round-trip decimal formatting for floating point output.
#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace clonesim {

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return std::to_string(x);
  return std::string(buf, end);
}

}  // namespace clonesim
