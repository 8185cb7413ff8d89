#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twofreq {

struct GradCheckInstance {
  std::string network;  // "lstm" or "mlp"
  std::size_t inputs = 0, hidden = 0, steps = 0;
  double param_error = 0.0;
  double input_error = 0.0;  // lstm only
};

struct GradCheckSummary {
  std::vector<GradCheckInstance> instances;
  double max_error = 0.0;
};

/// `count` random LSTM instances (F <= 5, H <= 8, T <= 10) and `count` random
/// MLP instances, each checked against central differences on a squared-error loss.
GradCheckSummary run_gradcheck_suite(std::size_t count, std::uint64_t seed);

}  // namespace twofreq
