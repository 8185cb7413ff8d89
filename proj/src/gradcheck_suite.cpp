#include "twofreq/gradcheck_suite.hpp"

#include <algorithm>

#include "twofreq/grad_check.hpp"
#include "twofreq/lstm.hpp"
#include "twofreq/mlp.hpp"
#include "twofreq/rng.hpp"

namespace twofreq {
namespace {

// Losses are O(1), so central differences at 1e-5 are dominated by rounding
// on components near 1e-7. 1e-4 keeps truncation error below 1e-8.
constexpr double kStep = 1e-4;

std::vector<double> flatten(const GradBlocks& blocks) {
  std::vector<double> out;
  for (auto b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <typename Model>
void unflatten(Model& model, std::span<const double> flat) {
  std::size_t k = 0;
  for (auto b : model.blocks())
    for (double& v : b) v = flat[k++];
}

GradCheckInstance check_lstm(Rng& rng) {
  GradCheckInstance r;
  r.network = "lstm";
  r.inputs = 1 + rng.below(5);
  r.hidden = 1 + rng.below(8);
  r.steps = 1 + rng.below(10);
  LstmParams params = lstm_init(r.inputs, r.hidden, rng);
  for (double& b : params.bias) b += rng.uniform(-0.5, 0.5);
  params.head_bias = rng.uniform(-0.5, 0.5);
  Matrix seq(r.steps, r.inputs);
  for (double& v : seq.values()) v = rng.normal();
  const double target = rng.normal();

  const auto loss = [&](const LstmParams& p, MatrixView x) {
    const double e = lstm_forward(p, x).prediction - target;
    return e * e;
  };
  const LstmCache cache = lstm_forward(params, seq);
  LstmParams grads = lstm_zeros(r.inputs, r.hidden);
  Matrix input_grads;
  lstm_backward(params, cache, 2.0 * (cache.prediction - target), grads, &input_grads);

  const std::vector<double> flat = flatten(params.const_blocks());
  r.param_error = grad_check(
      [&](std::span<const double> p) {
        LstmParams q = params;
        unflatten(q, p);
        return loss(q, seq);
      },
      flat, flatten(grads.const_blocks()), kStep);
  r.input_error = grad_check(
      [&](std::span<const double> x) { return loss(params, MatrixView{x, r.steps, r.inputs}); }, seq.values(),
      input_grads.values(), kStep);
  return r;
}

GradCheckInstance check_mlp(Rng& rng) {
  GradCheckInstance r;
  r.network = "mlp";
  r.inputs = 1 + rng.below(5 * 10);
  r.hidden = 1 + rng.below(8);
  MlpModel model = mlp_init(r.inputs, r.hidden, rng);
  std::vector<double> x(r.inputs);
  for (double& v : x) v = rng.normal();
  const double target = rng.normal();
  const double e = mlp_forward(model, x) - target;
  MlpModel grads = mlp_zeros(r.inputs, r.hidden);
  mlp_backward(model, x, 2.0 * e, grads);
  r.param_error = grad_check(
      [&](std::span<const double> p) {
        MlpModel q = model;
        unflatten(q, p);
        const double d = mlp_forward(q, x) - target;
        return d * d;
      },
      flatten(model.const_blocks()), flatten(grads.const_blocks()), kStep);
  return r;
}

}  // namespace

GradCheckSummary run_gradcheck_suite(std::size_t count, std::uint64_t seed) {
  GradCheckSummary s;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed + i);
    s.instances.push_back(check_lstm(rng));
    s.instances.push_back(check_mlp(rng));
  }
  for (const auto& r : s.instances) s.max_error = std::max({s.max_error, r.param_error, r.input_error});
  return s;
}

}  // namespace twofreq
