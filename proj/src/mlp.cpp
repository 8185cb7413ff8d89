#include "twofreq/mlp.hpp"

#include <cmath>

#include "twofreq/error.hpp"
#include "twofreq/rng.hpp"

namespace twofreq {

ParamBlocks MlpModel::blocks() {
  return {w1.values(), std::span<double>(b1), std::span<double>(w2), std::span<double>(&b2, 1)};
}

GradBlocks MlpModel::const_blocks() const {
  return {w1.values(), std::span<const double>(b1), std::span<const double>(w2), std::span<const double>(&b2, 1)};
}

MlpModel mlp_zeros(std::size_t inputs, std::size_t hidden) {
  MlpModel m;
  m.w1 = Matrix(hidden, inputs);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(hidden, 0.0);
  return m;
}

MlpModel mlp_init(std::size_t inputs, std::size_t hidden, Rng& rng) {
  MlpModel m = mlp_zeros(inputs, hidden);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  for (double& w : m.w1.values()) w = rng.uniform(-a1, a1);
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : m.w2) w = rng.uniform(-a2, a2);
  return m;
}

double mlp_forward(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.inputs())
    throw ShapeError("mlp_forward: input size " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(model.inputs()));
  double y = model.b2;
  for (std::size_t h = 0; h < model.hidden(); ++h)
    y += model.w2[h] * std::tanh(dot(model.w1.row(h), x) + model.b1[h]);
  return y;
}

void mlp_backward(const MlpModel& model, std::span<const double> x, double upstream, MlpModel& grads) {
  grads.b2 += upstream;
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    const double a = std::tanh(dot(model.w1.row(h), x) + model.b1[h]);
    grads.w2[h] += upstream * a;
    const double dz = upstream * model.w2[h] * (1.0 - a * a);
    grads.b1[h] += dz;
    auto row = grads.w1.row(h);
    for (std::size_t i = 0; i < x.size(); ++i) row[i] += dz * x[i];
  }
}

void MlpTrainConfig::validate() const {
  if (hidden < 1) throw ConfigError("mlp: hidden size must be at least 1");
  if (epochs < 1) throw ConfigError("mlp: epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("mlp: batch size must be at least 1");
  optimizer.validate();
}

namespace {

MlpTrainResult train_rows(std::size_t n, std::size_t dim, const std::function<std::span<const double>(std::size_t)>& row,
                          std::span<const double> targets, const MlpTrainConfig& config) {
  config.validate();
  if (n == 0) throw DataError("mlp_train: empty dataset");
  if (targets.size() != n) throw ShapeError("mlp_train: target count mismatch");

  Rng rng(config.seed);
  MlpTrainResult result;
  result.model = mlp_init(dim, config.hidden, rng);
  MlpModel grads = mlp_zeros(dim, config.hidden);

  MinibatchSchedule schedule{n, config.batch_size, config.epochs, std::nullopt, rng.next()};
  result.loss_history = train_minibatch(
      schedule, result.model.blocks(), grads.const_blocks(), config.optimizer,
      [&](std::span<const std::size_t> batch) {
        for (auto& b : grads.blocks()) std::fill(b.begin(), b.end(), 0.0);
        double sse = 0.0;
        const double scale = 2.0 / static_cast<double>(batch.size());
        for (std::size_t idx : batch) {
          const auto x = row(idx);
          const double err = mlp_forward(result.model, x) - targets[idx];
          sse += err * err;
          mlp_backward(result.model, x, scale * err, grads);
        }
        return sse;
      });
  return result;
}

}  // namespace

MlpTrainResult mlp_train(const Matrix& inputs, std::span<const double> targets, const MlpTrainConfig& config) {
  return train_rows(inputs.rows(), inputs.cols(), [&](std::size_t i) { return inputs.row(i); }, targets, config);
}

MlpTrainResult mlp_train(const WindowedDataset& data, const MlpTrainConfig& config) {
  return train_rows(data.size(), data.window_length * data.features(),
                    [&](std::size_t i) { return data.window(i).data; }, data.targets, config);
}

}  // namespace twofreq
