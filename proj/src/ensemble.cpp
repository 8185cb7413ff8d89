#include "twofreq/ensemble.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "twofreq/log.hpp"

namespace twofreq {
namespace {

const std::string kClose = "close";

Matrix normalized_ratios(const AnnualFrame& frame, const NormStats& stats) {
  Matrix out(frame.ratios.rows(), frame.ratios.cols());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = stats.normalize(c, frame.ratios(r, c));
  return out;
}

MatrixView prefix(const Matrix& m, std::size_t rows) { return {m.values().subspan(0, rows * m.cols()), rows, m.cols()}; }

}  // namespace

std::optional<double> PredictionTable::find(const std::string& symbol, int year) const {
  auto it = values.find({symbol, year});
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::optional<int> PredictionTable::first_year(const std::string& symbol) const {
  auto it = values.lower_bound({symbol, std::numeric_limits<int>::min()});
  if (it == values.end() || it->first.first != symbol) return std::nullopt;
  return it->first.second;
}

std::optional<double> AnnualLearner::predicted_close(const std::string& symbol, int year) const {
  const auto z = table.find(symbol, year);
  const auto stats = close_stats.find(symbol);
  if (!z || stats == close_stats.end()) return std::nullopt;
  return stats->second.denormalize(0, *z);
}

int last_complete_year(const Date& train_end) {
  return train_end.month == 12 && train_end.day == 31 ? train_end.year : train_end.year - 1;
}

AnnualLearner train_learner1(const std::map<std::string, AnnualFrame>& annual, int last_training_year,
                             const LstmTrainConfig& config, std::vector<std::string>* excluded,
                             std::vector<double>* loss_history) {
  AnnualLearner learner;
  learner.last_training_year = last_training_year;

  struct Prepared {
    const AnnualFrame* frame;
    Matrix z;
  };
  std::vector<Prepared> included;
  std::vector<MatrixView> inputs;
  std::vector<double> targets;

  for (const auto& [symbol, frame] : annual) {
    frame.validate();
    if (learner.ratio_names.empty()) learner.ratio_names = frame.ratio_names;
    if (frame.ratio_names != learner.ratio_names)
      throw DataError("annual frame '" + symbol + "' has a different ratio list");
    if (frame.size() < 2) {
      log::warn("learner 1: '", symbol, "' has ", frame.size(), " year(s) of fundamentals; excluded");
      if (excluded) excluded->push_back(symbol);
      continue;
    }
    std::size_t fit_rows = 0;
    while (fit_rows < frame.size() && frame.years[fit_rows] <= last_training_year) ++fit_rows;
    std::vector<double> closes;
    for (std::size_t r = 0; r < fit_rows; ++r)
      if (!is_missing(frame.target_close[r])) closes.push_back(frame.target_close[r]);
    if (closes.empty()) {
      log::warn("learner 1: '", symbol, "' has no training year with a known close; excluded");
      if (excluded) excluded->push_back(symbol);
      continue;
    }

    std::vector<std::vector<double>> cols(frame.ratios.cols());
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t r = 0; r < fit_rows; ++r) cols[c].push_back(frame.ratios(r, c));
    learner.ratio_stats[symbol] = fit_stats(frame.ratio_names, cols);
    const std::vector<std::string> close_name{kClose};
    learner.close_stats[symbol] = fit_stats(close_name, std::vector<std::vector<double>>{closes});
    included.push_back({&frame, normalized_ratios(frame, learner.ratio_stats[symbol])});
  }
  if (included.empty()) throw DataError("learner 1: no symbol with usable fundamentals");

  for (const auto& p : included) {
    const NormStats& cs = learner.close_stats.at(p.frame->symbol);
    for (std::size_t r = 0; r < p.frame->size() && p.frame->years[r] <= last_training_year; ++r) {
      if (is_missing(p.frame->target_close[r])) continue;
      inputs.push_back(prefix(p.z, r + 1));
      targets.push_back(cs.normalize(0, p.frame->target_close[r]));
    }
  }

  LstmTrainResult trained = lstm_train(inputs, targets, config);
  learner.params = std::move(trained.params);
  if (loss_history) *loss_history = std::move(trained.loss_history);

  for (const auto& p : included)
    for (std::size_t r = 0; r < p.frame->size(); ++r)
      learner.table.values[{p.frame->symbol, p.frame->years[r]}] = lstm_predict(learner.params, prefix(p.z, r + 1));
  return learner;
}

DailyFrame inject_feature(DailyFrame daily, const PredictionTable& table, const AlignmentRule& rule) {
  const auto first = table.first_year(daily.symbol);
  std::vector<double> column(daily.size());
  std::vector<int> gaps;
  for (std::size_t i = 0; i < daily.size(); ++i) {
    int year = rule.year_for(daily.dates[i]);
    if (rule.extend_first_year && first && year < *first) year = *first;
    if (const auto v = table.find(daily.symbol, year)) {
      column[i] = *v;
    } else if (gaps.empty() || gaps.back() != year) {
      gaps.push_back(year);
    }
  }
  if (!gaps.empty()) {
    std::ostringstream msg;
    msg << "prediction table has no entry for";
    for (std::size_t i = 0; i < gaps.size(); ++i) msg << (i ? ", " : " ") << "(" << daily.symbol << ", " << gaps[i] << ")";
    throw DataError(msg.str());
  }
  daily.set_column(kInjectedFeature, std::move(column));
  return daily;
}

const std::vector<std::string>& daily_features() {
  static const std::vector<std::string> names{"open", "high", "low", "close", "volume", "macd", "signal", "rsi"};
  return names;
}

const std::vector<std::string>& ensemble_features() {
  static const std::vector<std::string> names = [] {
    auto n = daily_features();
    n.push_back(kInjectedFeature);
    return n;
  }();
  return names;
}

EnsembleConfig::EnsembleConfig() {
  learner1.hidden = 20;
  learner2.hidden = 200;
  learner1.optimizer.learning_rate = 0.005;
  learner2.optimizer.learning_rate = 0.005;
}

void EnsembleConfig::validate() const {
  learner1.validate();
  learner2.validate();
  if (window_length < 1) throw ConfigError("window_length must be at least 1");
}

EnsembleModel train_learner2(const std::map<std::string, DailyFrame>& daily_train, AnnualLearner learner1,
                             const EnsembleConfig& config, std::vector<double>* loss_history) {
  config.validate();
  EnsembleModel model;
  model.learner1 = std::move(learner1);
  model.features = ensemble_features();
  model.alignment = config.alignment;
  model.window_length = config.window_length;

  std::vector<WindowedDataset> parts;
  for (const auto& [symbol, frame] : daily_train) {
    if (!model.learner1.table.has_symbol(symbol)) {
      log::warn("ensemble: '", symbol, "' has no learner-1 predictions; skipped");
      continue;
    }
    DailyFrame injected = inject_feature(frame, model.learner1.table, model.alignment);
    NormStats stats = fit_normalize(injected, model.features);
    parts.push_back(
        make_windows(apply_normalize(std::move(injected), stats), stats, model.features, model.window_length));
    model.daily_stats.emplace(symbol, std::move(stats));
  }
  if (parts.empty()) throw DataError("no training windows");
  LstmTrainResult trained = lstm_train(merge(parts), config.learner2);
  model.learner2 = std::move(trained.params);
  if (loss_history) *loss_history = std::move(trained.loss_history);
  return model;
}

EnsembleModel train_ensemble(const std::map<std::string, DailyFrame>& daily_train,
                             const std::map<std::string, AnnualFrame>& annual, const EnsembleConfig& config,
                             TrainingHistory* history) {
  config.validate();
  if (daily_train.empty() || annual.empty()) throw StageError(1, "empty symbol universe");

  std::map<std::string, AnnualFrame> joint;
  for (const auto& [symbol, frame] : annual)
    if (daily_train.count(symbol)) joint.emplace(symbol, frame);
  if (joint.empty()) throw StageError(1, "no symbol has both daily and annual data");

  AnnualLearner learner1;
  try {
    learner1 = train_learner1(joint, config.last_training_year, config.learner1, nullptr,
                              history ? &history->learner1 : nullptr);
  } catch (const Error& e) {
    throw StageError(1, e.what());
  }
  try {
    return train_learner2(daily_train, std::move(learner1), config, history ? &history->learner2 : nullptr);
  } catch (const Error& e) {
    throw StageError(2, e.what());
  }
}

WindowedDataset ensemble_windows(const EnsembleModel& model, const DailyFrame& raw) {
  auto stats = model.daily_stats.find(raw.symbol);
  if (stats == model.daily_stats.end()) throw DataError("symbol not in model: '" + raw.symbol + "'");
  DailyFrame injected = inject_feature(raw, model.learner1.table, model.alignment);
  return make_windows(apply_normalize(std::move(injected), stats->second), stats->second, model.features,
                      model.window_length);
}

double predict_next_close(const EnsembleModel& model, const std::string& symbol, const DailyFrame& recent) {
  auto it = model.daily_stats.find(symbol);
  if (it == model.daily_stats.end()) throw DataError("symbol not in model: '" + symbol + "'");
  const NormStats& stats = it->second;
  const std::size_t T = model.window_length;
  if (recent.size() < T)
    throw DataError("window for '" + symbol + "' has " + std::to_string(recent.size()) + " rows, model needs " +
                    std::to_string(T));
  DailyFrame window = recent.slice(recent.size() - T, recent.size());
  window.symbol = symbol;
  window = apply_normalize(inject_feature(std::move(window), model.learner1.table, model.alignment), stats);

  const std::size_t F = model.features.size();
  Matrix input(T, F);
  for (std::size_t c = 0; c < F; ++c) {
    const auto& col = window.column(model.features[c]);
    for (std::size_t t = 0; t < T; ++t) {
      if (is_missing(col[t])) throw DataError("window for '" + symbol + "' has missing " + model.features[c]);
      input(t, c) = col[t];
    }
  }
  const double z = lstm_predict(model.learner2, input);
  return stats.denormalize(stats.index_of("close"), z);
}

}  // namespace twofreq
