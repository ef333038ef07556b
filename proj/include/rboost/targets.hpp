#ifndef RBOOST_TARGETS_HPP
#define RBOOST_TARGETS_HPP

#include "rboost/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>

namespace rboost {

/// Input dimension of synthetic regression function m1..m9.
inline std::size_t target_dimension(int target_id) {
  if (target_id >= 1 && target_id <= 3) return 1;
  if (target_id >= 4 && target_id <= 6) return 2;
  if (target_id >= 7 && target_id <= 9) return 10;
  throw InvalidInput("unknown target id " + std::to_string(target_id) + " (expected 1..9)");
}

namespace targets {

inline double m1(double x) { return 2.0 * std::max(1.0, std::min(3.0 + 2.0 * x, 3.0 - 8.0 * x)); }

inline double m2(double x) {
  if (x >= -0.25 && x < 0.0) return 10.0 * std::sqrt(-x) * std::sin(8.0 * std::numbers::pi * x);
  return 0.0;
}

inline double m3(double x) { return 3.0 * std::sin(std::numbers::pi * x / 2.0); }

inline double m4(double x1, double x2) { return x1 * std::sin(x1 * x1) - x2 * std::sin(x2 * x2); }

inline double m5(double x1, double x2) { return 4.0 / (1.0 + 4.0 * x1 * x1 + 4.0 * x2 * x2); }

inline double m6(double x1, double x2) { return 6.0 - 2.0 * std::min(3.0, 4.0 * x1 * x1 + 4.0 * std::abs(x2)); }

inline double m7(std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double term = x[j] * std::sin(x[j] * x[j]);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

inline double m8(std::span<const double> x) {
  double a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < 5; ++j) a += x[j];
  for (std::size_t j = 5; j < 10; ++j) b += x[j];
  return m6(a, b);
}

inline double m9(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < 10; ++j) s += x[j];
  return m2(s);
}

} // namespace targets

inline double eval_target(int target_id, std::span<const double> x) {
  const std::size_t d = target_dimension(target_id);
  if (x.size() != d)
    throw InvalidInput("target m" + std::to_string(target_id) + " takes " + std::to_string(d) +
                       "-dimensional input, got " + std::to_string(x.size()));
  switch (target_id) {
  case 1: return targets::m1(x[0]);
  case 2: return targets::m2(x[0]);
  case 3: return targets::m3(x[0]);
  case 4: return targets::m4(x[0], x[1]);
  case 5: return targets::m5(x[0], x[1]);
  case 6: return targets::m6(x[0], x[1]);
  case 7: return targets::m7(x);
  case 8: return targets::m8(x);
  default: return targets::m9(x);
  }
}

} // namespace rboost

#endif // RBOOST_TARGETS_HPP
