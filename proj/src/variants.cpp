#include "twofreq/variants.hpp"

#include "twofreq/log.hpp"

namespace twofreq {
namespace {

struct PooledWindows {
  WindowedDataset data;
  std::map<std::string, NormStats> stats;
};

PooledWindows pooled_windows(const std::map<std::string, DailyFrame>& daily_train, std::size_t window_length) {
  PooledWindows out;
  std::vector<WindowedDataset> parts;
  for (const auto& [symbol, frame] : daily_train) {
    NormStats stats = fit_normalize(frame, daily_features());
    parts.push_back(make_windows(apply_normalize(frame, stats), stats, daily_features(), window_length));
    out.stats.emplace(symbol, std::move(stats));
  }
  if (parts.empty()) throw DataError("no daily training data");
  out.data = merge(parts);
  return out;
}

}  // namespace

DailyModel train_daily_lstm(const std::map<std::string, DailyFrame>& daily_train, std::size_t window_length,
                            const LstmTrainConfig& config, std::vector<double>* loss_history) {
  PooledWindows pooled = pooled_windows(daily_train, window_length);
  LstmTrainResult trained = lstm_train(pooled.data, config);
  if (loss_history) *loss_history = std::move(trained.loss_history);
  return DailyModel{std::move(trained.params), daily_features(), std::move(pooled.stats), window_length};
}

DailyModel train_daily_mlp(const std::map<std::string, DailyFrame>& daily_train, std::size_t window_length,
                           const MlpTrainConfig& config, std::vector<double>* loss_history) {
  PooledWindows pooled = pooled_windows(daily_train, window_length);
  MlpTrainResult trained = mlp_train(pooled.data, config);
  if (loss_history) *loss_history = std::move(trained.loss_history);
  return DailyModel{std::move(trained.model), daily_features(), std::move(pooled.stats), window_length};
}

WindowedDataset daily_windows(const DailyModel& model, const DailyFrame& raw) {
  auto it = model.stats.find(raw.symbol);
  if (it == model.stats.end()) throw DataError("symbol not in model: '" + raw.symbol + "'");
  return make_windows(apply_normalize(raw, it->second), it->second, model.features, model.window_length);
}

std::vector<double> predict_normalized(const DailyModel& model, const WindowedDataset& windows) {
  if (const auto* lstm = std::get_if<LstmParams>(&model.network)) return lstm_predict(*lstm, windows);
  const auto& mlp = std::get<MlpModel>(model.network);
  std::vector<double> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) out.push_back(mlp_forward(mlp, windows.window(i).data));
  return out;
}

double predict_next_close(const DailyModel& model, const std::string& symbol, const DailyFrame& recent) {
  auto it = model.stats.find(symbol);
  if (it == model.stats.end()) throw DataError("symbol not in model: '" + symbol + "'");
  const NormStats& stats = it->second;
  const std::size_t T = model.window_length;
  if (recent.size() < T)
    throw DataError("window for '" + symbol + "' has " + std::to_string(recent.size()) + " rows, model needs " +
                    std::to_string(T));
  const DailyFrame window = apply_normalize(recent.slice(recent.size() - T, recent.size()), stats);
  const std::size_t F = model.features.size();
  Matrix input(T, F);
  for (std::size_t c = 0; c < F; ++c) {
    const auto& col = window.column(model.features[c]);
    for (std::size_t t = 0; t < T; ++t) {
      if (is_missing(col[t])) throw DataError("window for '" + symbol + "' has missing " + model.features[c]);
      input(t, c) = col[t];
    }
  }
  const double z = std::holds_alternative<LstmParams>(model.network)
                       ? lstm_predict(std::get<LstmParams>(model.network), input)
                       : mlp_forward(std::get<MlpModel>(model.network), input.values());
  return stats.denormalize(stats.index_of("close"), z);
}

double predict_annual_close(const AnnualLearner& learner, const std::string& symbol, const Date& date,
                            const AlignmentRule& rule) {
  int year = rule.year_for(date);
  const auto first = learner.table.first_year(symbol);
  if (!first) throw DataError("symbol not in model: '" + symbol + "'");
  if (rule.extend_first_year && year < *first) year = *first;
  const auto price = learner.predicted_close(symbol, year);
  if (!price) throw DataError("prediction table has no entry for (" + symbol + ", " + std::to_string(year) + ")");
  return *price;
}

}  // namespace twofreq
