#include "twofreq/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "twofreq/error.hpp"
#include "twofreq/log.hpp"
#include "twofreq/rng.hpp"

namespace twofreq {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("optimizer: learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("optimizer: beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("optimizer: beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("optimizer: epsilon must be positive");
  if (clip_norm && !(*clip_norm > 0.0)) throw ConfigError("optimizer: clip_norm must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("optimizer: weight_decay must be non-negative");
}

double global_norm(const GradBlocks& grads) {
  double ss = 0.0;
  for (const auto& g : grads)
    for (double v : g) ss += v * v;
  return std::sqrt(ss);
}

void optimizer_step(const ParamBlocks& params, const GradBlocks& grads, OptimizerState& state,
                    const OptimizerConfig& config) {
  if (params.size() != grads.size()) throw ShapeError("optimizer_step: block count mismatch");
  for (std::size_t b = 0; b < params.size(); ++b)
    if (params[b].size() != grads[b].size()) throw ShapeError("optimizer_step: block size mismatch");

  const double norm = global_norm(grads);
  if (!std::isfinite(norm)) throw TrainingError("optimizer_step: non-finite gradient");
  const double scale = config.clip_norm && norm > *config.clip_norm ? *config.clip_norm / norm : 1.0;
  if (config.weight_decay > 0.0) {
    const double shrink = 1.0 - config.learning_rate * config.weight_decay;
    for (auto block : params)
      for (double& p : block) p *= shrink;
  }

  if (config.kind == OptimizerKind::sgd) {
    for (std::size_t b = 0; b < params.size(); ++b)
      for (std::size_t i = 0; i < params[b].size(); ++i) params[b][i] -= config.learning_rate * scale * grads[b][i];
    ++state.step;
    return;
  }

  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), {});
    state.v.assign(params.size(), {});
    for (std::size_t b = 0; b < params.size(); ++b) {
      state.m[b].assign(params[b].size(), 0.0);
      state.v[b].assign(params[b].size(), 0.0);
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& m = state.m[b];
    auto& v = state.v[b];
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double g = grads[b][i] * scale;
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      params[b][i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
    }
  }
}

std::vector<double> train_minibatch(const MinibatchSchedule& schedule, const ParamBlocks& params,
                                    const GradBlocks& grads, const OptimizerConfig& config,
                                    const std::function<double(std::span<const std::size_t>)>& batch_step) {
  if (schedule.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (schedule.batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (schedule.samples == 0) throw DataError("training set is empty");
  config.validate();

  Rng rng(schedule.seed);
  OptimizerState state;
  std::vector<std::size_t> order(schedule.samples);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double> history;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double total = 0.0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += schedule.batch_size, ++batch) {
      const std::size_t len = std::min(schedule.batch_size, order.size() - start);
      const double sse = batch_step(std::span<const std::size_t>(order).subspan(start, len));
      if (!std::isfinite(sse))
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch));
      total += sse;
      try {
        optimizer_step(params, grads, state, config);
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch));
      }
    }
    const double loss = total / static_cast<double>(order.size());
    history.push_back(loss);
    log::debug("epoch ", epoch, " loss ", loss);
    if (schedule.patience) {
      if (loss < best) {
        best = loss;
        stale = 0;
      } else if (++stale >= *schedule.patience) {
        log::info("early stop after epoch ", epoch);
        break;
      }
    }
  }
  return history;
}

}  // namespace twofreq
