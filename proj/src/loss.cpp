#include "twofreq/loss.hpp"

#include "twofreq/error.hpp"

namespace twofreq {

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw ShapeError("mse_loss: " + std::to_string(pred.size()) + " predictions vs " +
                     std::to_string(target.size()) + " targets");
  if (pred.empty()) throw ShapeError("mse_loss: empty input");
  const double n = static_cast<double>(pred.size());
  LossResult out;
  out.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.loss += d * d;
    out.grad[i] = 2.0 * d / n;
  }
  out.loss /= n;
  return out;
}

}  // namespace twofreq
