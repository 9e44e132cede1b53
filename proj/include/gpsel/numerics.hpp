#pragma once

#include <cmath>

namespace gpsel {

// softplus(x) = log(1 + e^x), stable for large |x|. Maps raw (unconstrained)
// hyperparameters to their positive constrained values.
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// d softplus / dx = sigmoid(x).
inline double sigmoid(double x) {
  return x > 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// log(e^a + e^b) without overflow; tolerates -inf.
inline double logaddexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_normal_pdf(double x, double mean, double stdev) {
  const double z = (x - mean) / stdev;
  return -0.5 * z * z - std::log(stdev) - 0.5 * std::log(2.0 * M_PI);
}

}  // namespace gpsel
