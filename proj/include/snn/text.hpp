#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "snn/types.hpp"

namespace snn {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  require_run(res.ec == std::errc{} && res.ptr == s.data() + s.size(),
              context + ": bad number '" + std::string(s) + "'");
  return x;
}

inline long parse_long(std::string_view s, const std::string& context) {
  long x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  require_run(res.ec == std::errc{} && res.ptr == s.data() + s.size(),
              context + ": bad integer '" + std::string(s) + "'");
  return x;
}

}  // namespace snn
