#pragma once

#include <functional>
#include <span>

namespace twofreq {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares `analytic` against central differences (f(p + eps) - f(p - eps)) / 2eps
/// coordinate by coordinate. Relative error is |a - n| / max(|a|, |n|, 1e-12).
GradCheckResult grad_check_detailed(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> params, std::span<const double> analytic,
                                    double eps = 1e-5);

inline double grad_check(const std::function<double(std::span<const double>)>& f, std::span<const double> params,
                         std::span<const double> analytic, double eps = 1e-5) {
  return grad_check_detailed(f, params, analytic, eps).max_relative_error;
}

}  // namespace twofreq
