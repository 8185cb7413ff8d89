#pragma once

#include <cmath>

#include "twofreq/matrix.hpp"

namespace twofreq {

/// Logistic function, evaluated without overflow for large |x|.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Derivatives are expressed in terms of the activation's output.
inline double sigmoid_derivative_from_output(double s) { return s * (1.0 - s); }
inline double tanh_derivative_from_output(double t) { return 1.0 - t * t; }

inline double sigmoid_derivative(double x) { return sigmoid_derivative_from_output(sigmoid(x)); }
inline double tanh_derivative(double x) { return tanh_derivative_from_output(std::tanh(x)); }

Matrix sigmoid(const Matrix& m);
Matrix tanh(const Matrix& m);
Matrix sigmoid_derivative(const Matrix& m);
Matrix tanh_derivative(const Matrix& m);

}  // namespace twofreq
