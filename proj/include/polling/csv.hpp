#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace polling {

// CSV and report numbers: fixed significant digits, '.' decimal point no
// matter what the process locale says.
inline std::string fmt(double v, int significant = 6) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, significant);
  return std::string(buf, res.ptr);
}

inline std::string fmt(std::int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace polling
