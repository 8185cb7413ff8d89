#pragma once

#include <span>
#include <vector>

namespace twofreq {

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d pred
};

/// Mean squared error: loss = mean((pred - target)^2), grad = 2 (pred - target) / N.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

}  // namespace twofreq
