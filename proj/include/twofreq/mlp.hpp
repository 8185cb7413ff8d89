#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twofreq/matrix.hpp"
#include "twofreq/optimizer.hpp"
#include "twofreq/preprocess.hpp"

namespace twofreq {

class Rng;

/// One tanh hidden layer and a linear scalar output: y = w2 . tanh(W1 x + b1) + b2.
struct MlpModel {
  Matrix w1;                // hidden x inputs
  std::vector<double> b1;   // hidden
  std::vector<double> w2;   // hidden
  double b2 = 0.0;

  std::size_t inputs() const { return w1.cols(); }
  std::size_t hidden() const { return w1.rows(); }

  ParamBlocks blocks();
  GradBlocks const_blocks() const;
  bool operator==(const MlpModel&) const = default;
};

/// Zero parameters of the given shape.
MlpModel mlp_zeros(std::size_t inputs, std::size_t hidden);
/// Weights uniform in +-1/sqrt(fan_in), biases zero.
MlpModel mlp_init(std::size_t inputs, std::size_t hidden, Rng& rng);

double mlp_forward(const MlpModel& model, std::span<const double> x);

/// Accumulates d(output)/d(params) * upstream into `grads` (same shape as model).
void mlp_backward(const MlpModel& model, std::span<const double> x, double upstream, MlpModel& grads);

struct MlpTrainConfig {
  std::size_t hidden = 10;
  int epochs = 100;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 42;

  void validate() const;
};

struct MlpTrainResult {
  MlpModel model;
  std::vector<double> loss_history;
};

/// Trains on the rows of `inputs` (one sample per row) with MSE loss.
MlpTrainResult mlp_train(const Matrix& inputs, std::span<const double> targets, const MlpTrainConfig& config);
/// Trains on windows flattened to T*F vectors.
MlpTrainResult mlp_train(const WindowedDataset& data, const MlpTrainConfig& config);

}  // namespace twofreq
