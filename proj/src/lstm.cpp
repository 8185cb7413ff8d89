#include "twofreq/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "twofreq/activations.hpp"
#include "twofreq/error.hpp"
#include "twofreq/rng.hpp"

namespace twofreq {
namespace {

void check_sequence(const LstmParams& params, MatrixView sequence) {
  if (sequence.rows == 0) throw ShapeError("lstm: empty sequence");
  if (sequence.cols != params.input_size())
    throw ShapeError("lstm: sequence has " + std::to_string(sequence.cols) + " features, model expects " +
                     std::to_string(params.input_size()));
}

// One timestep. `xh` must already hold [x_t; h_{t-1}]. Writes activated gates
// (4H), the new cell state, tanh(cell) and the new hidden state.
void step(const LstmParams& p, std::span<const double> xh, std::span<const double> c_prev, std::span<double> gates,
          std::span<double> c, std::span<double> c_tanh, std::span<double> h) {
  const std::size_t H = p.hidden_size();
  matvec(p.weights, xh, gates);
  for (std::size_t r = 0; r < 4 * H; ++r) gates[r] += p.bias[r];
  for (std::size_t k = 0; k < 3 * H; ++k) gates[k] = sigmoid(gates[k]);
  for (std::size_t k = 3 * H; k < 4 * H; ++k) gates[k] = std::tanh(gates[k]);
  for (std::size_t k = 0; k < H; ++k) {
    const double i = gates[k], f = gates[H + k], o = gates[2 * H + k], g = gates[3 * H + k];
    c[k] = f * c_prev[k] + i * g;
    c_tanh[k] = std::tanh(c[k]);
    h[k] = o * c_tanh[k];
  }
}

}  // namespace

MatrixView LstmParams::gate_weights(Gate g) const {
  const std::size_t H = hidden_size();
  const std::size_t stride = weights.cols();
  return {weights.values().subspan(static_cast<std::size_t>(g) * H * stride, H * stride), H, stride};
}

std::span<const double> LstmParams::gate_bias(Gate g) const {
  return std::span<const double>(bias).subspan(static_cast<std::size_t>(g) * hidden_size(), hidden_size());
}

ParamBlocks LstmParams::blocks() {
  return {weights.values(), std::span<double>(bias), std::span<double>(head), std::span<double>(&head_bias, 1)};
}

GradBlocks LstmParams::const_blocks() const {
  return {weights.values(), std::span<const double>(bias), std::span<const double>(head),
          std::span<const double>(&head_bias, 1)};
}

std::size_t LstmParams::parameter_count() const { return weights.size() + bias.size() + head.size() + 1; }

void LstmParams::validate() const {
  const std::size_t H = hidden_size();
  if (H == 0) throw ShapeError("lstm: hidden size is zero");
  if (weights.rows() != 4 * H || weights.cols() <= H || bias.size() != 4 * H)
    throw ShapeError("lstm: parameter shapes inconsistent with hidden size " + std::to_string(H));
  for (const auto& block : const_blocks())
    for (double v : block)
      if (!std::isfinite(v)) throw ShapeError("lstm: non-finite parameter");
}

LstmParams lstm_zeros(std::size_t input_size, std::size_t hidden_size) {
  if (input_size == 0 || hidden_size == 0) throw ShapeError("lstm: sizes must be positive");
  LstmParams p;
  p.weights = Matrix(4 * hidden_size, input_size + hidden_size);
  p.bias.assign(4 * hidden_size, 0.0);
  p.head.assign(hidden_size, 0.0);
  return p;
}

LstmParams lstm_init(std::size_t input_size, std::size_t hidden_size, Rng& rng) {
  LstmParams p = lstm_zeros(input_size, hidden_size);
  const double a = 1.0 / std::sqrt(static_cast<double>(input_size + hidden_size));
  for (double& w : p.weights.values()) w = rng.uniform(-a, a);
  const double b = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  for (double& w : p.head) w = rng.uniform(-b, b);
  std::fill(p.bias.begin() + static_cast<long>(hidden_size), p.bias.begin() + static_cast<long>(2 * hidden_size), 1.0);
  return p;
}

LstmCache lstm_forward(const LstmParams& params, MatrixView sequence) {
  check_sequence(params, sequence);
  const std::size_t T = sequence.rows, F = sequence.cols, H = params.hidden_size(), D = F + H;
  LstmCache cache;
  cache.steps = T;
  cache.input_size = F;
  cache.hidden_size = H;
  cache.xh.assign(T * D, 0.0);
  cache.gates.assign(T * 4 * H, 0.0);
  cache.cell.assign((T + 1) * H, 0.0);
  cache.cell_tanh.assign(T * H, 0.0);
  cache.hidden.assign((T + 1) * H, 0.0);

  for (std::size_t t = 0; t < T; ++t) {
    std::span<double> xh(cache.xh.data() + t * D, D);
    std::copy_n(sequence.row(t).begin(), F, xh.begin());
    std::copy_n(cache.hidden.data() + t * H, H, xh.begin() + static_cast<long>(F));
    step(params, xh, std::span<const double>(cache.cell.data() + t * H, H),
         std::span<double>(cache.gates.data() + t * 4 * H, 4 * H),
         std::span<double>(cache.cell.data() + (t + 1) * H, H), std::span<double>(cache.cell_tanh.data() + t * H, H),
         std::span<double>(cache.hidden.data() + (t + 1) * H, H));
  }
  cache.prediction = dot(params.head, cache.hidden_at(T)) + params.head_bias;
  return cache;
}

double lstm_predict(const LstmParams& params, MatrixView sequence) {
  check_sequence(params, sequence);
  const std::size_t T = sequence.rows, F = sequence.cols, H = params.hidden_size();
  std::vector<double> xh(F + H, 0.0), gates(4 * H), c_prev(H, 0.0), c(H), c_tanh(H), h(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    std::copy_n(sequence.row(t).begin(), F, xh.begin());
    std::copy(h.begin(), h.end(), xh.begin() + static_cast<long>(F));
    step(params, xh, c_prev, gates, c, c_tanh, h);
    std::swap(c, c_prev);
  }
  return dot(params.head, h) + params.head_bias;
}

std::vector<double> lstm_predict(const LstmParams& params, const WindowedDataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(lstm_predict(params, data.window(i)));
  return out;
}

void lstm_backward(const LstmParams& params, const LstmCache& cache, double loss_grad, LstmParams& grads,
                   Matrix* input_grads) {
  const std::size_t T = cache.steps, F = cache.input_size, H = cache.hidden_size, D = F + H;
  if (H != params.hidden_size() || F != params.input_size() || T == 0 || cache.xh.size() != T * D ||
      cache.hidden.size() != (T + 1) * H)
    throw ShapeError("lstm_backward: cache does not match parameters");
  if (grads.hidden_size() != H || grads.input_size() != F)
    throw ShapeError("lstm_backward: gradient buffer does not match parameters");
  if (input_grads) *input_grads = Matrix(T, F);

  grads.head_bias += loss_grad;
  const auto h_last = cache.hidden_at(T);
  for (std::size_t k = 0; k < H; ++k) grads.head[k] += loss_grad * h_last[k];

  std::vector<double> dh(H), dc(H, 0.0), dz(4 * H), dxh(D);
  for (std::size_t k = 0; k < H; ++k) dh[k] = loss_grad * params.head[k];

  for (std::size_t t = T; t-- > 0;) {
    const double* g = cache.gates.data() + t * 4 * H;
    const double* c_prev = cache.cell.data() + t * H;
    const double* c_tanh = cache.cell_tanh.data() + t * H;
    for (std::size_t k = 0; k < H; ++k) {
      const double i = g[k], f = g[H + k], o = g[2 * H + k], gg = g[3 * H + k];
      const double d_o = dh[k] * c_tanh[k];
      const double d_c = dc[k] + dh[k] * o * (1.0 - c_tanh[k] * c_tanh[k]);
      dz[k] = d_c * gg * sigmoid_derivative_from_output(i);
      dz[H + k] = d_c * c_prev[k] * sigmoid_derivative_from_output(f);
      dz[2 * H + k] = d_o * sigmoid_derivative_from_output(o);
      dz[3 * H + k] = d_c * i * tanh_derivative_from_output(gg);
      dc[k] = d_c * f;
    }
    const std::span<const double> xh(cache.xh.data() + t * D, D);
    outer_add(grads.weights, dz, xh);
    for (std::size_t r = 0; r < 4 * H; ++r) grads.bias[r] += dz[r];
    std::fill(dxh.begin(), dxh.end(), 0.0);
    matvec_transposed_add(params.weights, dz, dxh);
    std::copy_n(dxh.begin() + static_cast<long>(F), H, dh.begin());
    if (input_grads) std::copy_n(dxh.begin(), F, input_grads->row(t).begin());
  }
}

LstmParams lstm_backward(const LstmParams& params, const LstmCache& cache, double loss_grad) {
  LstmParams grads = lstm_zeros(params.input_size(), params.hidden_size());
  lstm_backward(params, cache, loss_grad, grads);
  return grads;
}

void LstmTrainConfig::validate() const {
  if (hidden < 1) throw ConfigError("lstm: hidden size must be at least 1");
  if (epochs < 1) throw ConfigError("lstm: epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("lstm: batch size must be at least 1");
  if (patience && *patience < 1) throw ConfigError("lstm: patience must be at least 1");
  optimizer.validate();
}

LstmTrainResult lstm_train(std::span<const MatrixView> inputs, std::span<const double> targets,
                           const LstmTrainConfig& config) {
  config.validate();
  if (inputs.empty()) throw DataError("lstm_train: empty dataset");
  if (inputs.size() != targets.size()) throw ShapeError("lstm_train: input/target count mismatch");
  const std::size_t F = inputs.front().cols;
  for (const auto& seq : inputs)
    if (seq.cols != F || seq.rows == 0) throw ShapeError("lstm_train: inconsistent sequence shapes");

  Rng rng(config.seed);
  LstmTrainResult result;
  result.params = lstm_init(F, config.hidden, rng);
  LstmParams grads = lstm_zeros(F, config.hidden);

  MinibatchSchedule schedule{inputs.size(), config.batch_size, config.epochs, config.patience, rng.next()};
  result.loss_history = train_minibatch(
      schedule, result.params.blocks(), grads.const_blocks(), config.optimizer,
      [&](std::span<const std::size_t> batch) {
        for (auto& b : grads.blocks()) std::fill(b.begin(), b.end(), 0.0);
        double sse = 0.0;
        const double scale = 2.0 / static_cast<double>(batch.size());
        for (std::size_t idx : batch) {
          const LstmCache cache = lstm_forward(result.params, inputs[idx]);
          const double err = cache.prediction - targets[idx];
          sse += err * err;
          lstm_backward(result.params, cache, scale * err, grads);
        }
        return sse;
      });
  return result;
}

LstmTrainResult lstm_train(const WindowedDataset& data, const LstmTrainConfig& config) {
  std::vector<MatrixView> views;
  views.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) views.push_back(data.window(i));
  return lstm_train(views, data.targets, config);
}

}  // namespace twofreq
