#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "twofreq/matrix.hpp"
#include "twofreq/optimizer.hpp"
#include "twofreq/preprocess.hpp"

namespace twofreq {

class Rng;

enum class Gate : std::size_t { input = 0, forget = 1, output = 2, candidate = 3 };

/// Single-layer LSTM with a linear regression head on the last hidden state.
///
/// The four gate weight matrices (each H x (F+H), acting on [x_t; h_{t-1}])
/// are stacked into one 4H x (F+H) matrix in the order input, forget, output,
/// candidate; `bias` is stacked the same way.
struct LstmParams {
  Matrix weights;
  std::vector<double> bias;
  std::vector<double> head;
  double head_bias = 0.0;

  std::size_t hidden_size() const { return head.size(); }
  std::size_t input_size() const { return weights.cols() - head.size(); }

  MatrixView gate_weights(Gate g) const;
  std::span<const double> gate_bias(Gate g) const;

  ParamBlocks blocks();
  GradBlocks const_blocks() const;
  std::size_t parameter_count() const;
  /// Throws ShapeError on inconsistent shapes or non-finite values.
  void validate() const;

  bool operator==(const LstmParams&) const = default;
};

LstmParams lstm_zeros(std::size_t input_size, std::size_t hidden_size);

/// Gate weights uniform in +-1/sqrt(F+H), head uniform in +-1/sqrt(H), forget
/// bias 1, all other biases 0.
LstmParams lstm_init(std::size_t input_size, std::size_t hidden_size, Rng& rng);

/// Activations of one forward pass, everything BPTT needs. Rows are timesteps.
struct LstmCache {
  std::size_t steps = 0;
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  std::vector<double> xh;         // T x (F+H): [x_t; h_{t-1}]
  std::vector<double> gates;      // T x 4H, activated i, f, o, g
  std::vector<double> cell;       // (T+1) x H, row 0 is c_0 = 0
  std::vector<double> cell_tanh;  // T x H
  std::vector<double> hidden;     // (T+1) x H, row 0 is h_0 = 0
  double prediction = 0.0;

  std::span<const double> hidden_at(std::size_t t) const {
    return std::span<const double>(hidden).subspan(t * hidden_size, hidden_size);
  }
  std::span<const double> cell_at(std::size_t t) const {
    return std::span<const double>(cell).subspan(t * hidden_size, hidden_size);
  }
};

/// Runs the recurrence from h_0 = c_0 = 0 over the T x F sequence.
LstmCache lstm_forward(const LstmParams& params, MatrixView sequence);

/// Full backpropagation through time. Accumulates d(loss)/d(params) into
/// `grads`, given d(loss)/d(prediction). When `input_grads` is non-null it
/// receives d(loss)/d(sequence) (T x F).
void lstm_backward(const LstmParams& params, const LstmCache& cache, double loss_grad, LstmParams& grads,
                   Matrix* input_grads = nullptr);

/// Convenience form returning freshly zeroed-then-accumulated gradients.
LstmParams lstm_backward(const LstmParams& params, const LstmCache& cache, double loss_grad);

/// Forward pass without retaining activations. Bitwise equal to
/// lstm_forward(params, sequence).prediction.
double lstm_predict(const LstmParams& params, MatrixView sequence);
std::vector<double> lstm_predict(const LstmParams& params, const WindowedDataset& data);

struct LstmTrainConfig {
  std::size_t hidden = 20;
  int epochs = 100;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 42;
  std::optional<int> patience;

  void validate() const;
};

struct LstmTrainResult {
  LstmParams params;
  std::vector<double> loss_history;  // mean training MSE per epoch
};

/// Mini-batch training on MSE. Sequences may differ in length but must share
/// the feature count.
LstmTrainResult lstm_train(std::span<const MatrixView> inputs, std::span<const double> targets,
                           const LstmTrainConfig& config);
LstmTrainResult lstm_train(const WindowedDataset& data, const LstmTrainConfig& config);

}  // namespace twofreq
