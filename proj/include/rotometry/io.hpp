#ifndef ROTOMETRY_IO_HPP
#define ROTOMETRY_IO_HPP

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rotometry/errors.hpp"

namespace rotometry {

// Shortest decimal form with the given number of significant digits, via
// to_chars: locale independent, so output files are reproducible bytewise.
inline std::string format_significant(double value, int digits = 12) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, digits);
  if (res.ec != std::errc()) throw NumericalError("format_significant: conversion failed");
  return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_double(std::string_view text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError(what + ": cannot parse '" + std::string(text) + "' as a number");
  }
  return v;
}

inline int parse_int(std::string_view text, const std::string& what) {
  int v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError(what + ": cannot parse '" + std::string(text) + "' as an integer");
  }
  return v;
}

}  // namespace detail

// Inclusive parameter grid written as start:stop:count. A single-point grid
// collapses to {start}.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  static GridSpec parse(std::string_view text) {
    const auto p1 = text.find(':');
    const auto p2 = text.find(':', p1 == std::string_view::npos ? p1 : p1 + 1);
    if (p1 == std::string_view::npos || p2 == std::string_view::npos) {
      throw ConfigError("grid: expected start:stop:count, got '" + std::string(text) + "'");
    }
    GridSpec g;
    g.start = detail::parse_double(text.substr(0, p1), "grid start");
    g.stop = detail::parse_double(text.substr(p1 + 1, p2 - p1 - 1), "grid stop");
    g.count = detail::parse_int(text.substr(p2 + 1), "grid count");
    if (g.count < 1) throw ConfigError("grid: count must be >= 1");
    return g;
  }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
      out.push_back(start);
    } else {
      for (int i = 0; i < count; ++i) {
        out.push_back(start + (stop - start) * i / (count - 1));
      }
    }
    return out;
  }
};

}  // namespace rotometry

#endif  // ROTOMETRY_IO_HPP
