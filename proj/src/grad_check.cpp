#include "twofreq/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "twofreq/error.hpp"

namespace twofreq {

GradCheckResult grad_check_detailed(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> params, std::span<const double> analytic, double eps) {
  if (params.size() != analytic.size()) throw ShapeError("grad_check: gradient size mismatch");
  std::vector<double> p(params.begin(), params.end());
  GradCheckResult result;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + eps;
    const double up = f(p);
    p[i] = saved - eps;
    const double down = f(p);
    p[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic[i];
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
    if (rel > result.max_relative_error || i == 0) {
      result.max_relative_error = std::max(result.max_relative_error, rel);
      if (rel >= result.max_relative_error) {
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace twofreq
