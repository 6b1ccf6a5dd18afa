#pragma once

#include <charconv>
#include <string>

namespace bellrelax {

/// 12 significant digits, '.' decimal separator regardless of locale.
inline std::string fmt_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace bellrelax
