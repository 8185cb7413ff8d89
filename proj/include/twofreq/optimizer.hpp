#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace twofreq {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::optional<double> clip_norm = 5.0;  // global gradient norm bound
  double weight_decay = 0.0;              // decoupled: p *= 1 - lr * weight_decay before each step

  void validate() const;  // throws ConfigError
};

using ParamBlocks = std::vector<std::span<double>>;
using GradBlocks = std::vector<std::span<const double>>;

/// Adam moment estimates, lazily sized on the first step.
struct OptimizerState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
};

double global_norm(const GradBlocks& grads);

/// In-place update of every parameter block from the matching gradient
/// block. Gradients are scaled down to `clip_norm` (global L2) first when
/// configured. Throws TrainingError on a non-finite gradient.
void optimizer_step(const ParamBlocks& params, const GradBlocks& grads, OptimizerState& state,
                    const OptimizerConfig& config);

struct MinibatchSchedule {
  std::size_t samples = 0;
  std::size_t batch_size = 32;
  int epochs = 100;
  std::optional<int> patience;  // stop after this many epochs without improvement
  std::uint64_t seed = 42;
};

/// Shuffled mini-batch loop shared by the trainers. `batch_step` receives the
/// sample indices of one batch, must leave the mean-loss gradient in the
/// blocks behind `grads`, and returns the summed squared error of the batch.
/// Returns the mean training loss of each epoch.
std::vector<double> train_minibatch(const MinibatchSchedule& schedule, const ParamBlocks& params,
                                    const GradBlocks& grads, const OptimizerConfig& config,
                                    const std::function<double(std::span<const std::size_t>)>& batch_step);

}  // namespace twofreq
