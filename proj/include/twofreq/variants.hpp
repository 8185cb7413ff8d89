#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "twofreq/ensemble.hpp"
#include "twofreq/lstm.hpp"
#include "twofreq/mlp.hpp"

namespace twofreq {

/// A single-frequency model on the eight daily features: either an LSTM on
/// the window sequence or an MLP on the flattened window.
struct DailyModel {
  std::variant<LstmParams, MlpModel> network;
  std::vector<std::string> features;
  std::map<std::string, NormStats> stats;
  std::size_t window_length = 0;

  bool is_mlp() const { return std::holds_alternative<MlpModel>(network); }
  bool operator==(const DailyModel&) const = default;
};

DailyModel train_daily_lstm(const std::map<std::string, DailyFrame>& daily_train, std::size_t window_length,
                            const LstmTrainConfig& config, std::vector<double>* loss_history = nullptr);

DailyModel train_daily_mlp(const std::map<std::string, DailyFrame>& daily_train, std::size_t window_length,
                           const MlpTrainConfig& config, std::vector<double>* loss_history = nullptr);

/// Normalized windows of a raw frame using the model's stats for its symbol.
WindowedDataset daily_windows(const DailyModel& model, const DailyFrame& raw);

/// Predictions in normalized close units, one per window.
std::vector<double> predict_normalized(const DailyModel& model, const WindowedDataset& windows);

double predict_next_close(const DailyModel& model, const std::string& symbol, const DailyFrame& recent);

/// Annual-only forecast: the learner-1 year-end close prediction of the year
/// that `date` maps to, in currency units.
double predict_annual_close(const AnnualLearner& learner, const std::string& symbol, const Date& date,
                            const AlignmentRule& rule);

}  // namespace twofreq
