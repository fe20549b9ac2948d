#ifndef MCPOIS_NUMERIC_HPP
#define MCPOIS_NUMERIC_HPP

#include <cmath>
#include <limits>
#include <span>

namespace mcpois {

inline constexpr double kLogitSaturation = 35.0;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pr(1 | t) = 1/(1+e^-t), saturating to exactly 0/1 beyond +-35.
inline double logistic(double t) {
  if (t >= kLogitSaturation) return 1.0;
  if (t <= -kLogitSaturation) return 0.0;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log Pr(1 | t), finite for all finite t.
inline double log_logistic(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  const double s = a > b ? b : a;
  return m + std::log1p(std::exp(s - m));
}

inline double log_sum_exp(std::span<const double> vals) {
  double m = kNegInf;
  for (double v : vals)
    if (v > m) m = v;
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : vals) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace mcpois

#endif
