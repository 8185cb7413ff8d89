#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twofreq/error.hpp"
#include "twofreq/ingest.hpp"
#include "twofreq/lstm.hpp"
#include "twofreq/preprocess.hpp"

namespace twofreq {

enum class AlignmentMode { same_year, lagged };

/// Maps a daily date onto the fiscal year whose annual prediction it receives.
/// `same_year` uses the date's own year; `lagged` uses the previous year.
/// With `extend_first_year`, dates before a symbol's first covered year take
/// that first year's prediction.
struct AlignmentRule {
  AlignmentMode mode = AlignmentMode::same_year;
  bool extend_first_year = false;

  int year_for(const Date& date) const { return mode == AlignmentMode::same_year ? date.year : date.year - 1; }
  bool operator==(const AlignmentRule&) const = default;
};

/// (symbol, fiscal year) -> learner-1 prediction of the normalized year-end close.
struct PredictionTable {
  std::map<std::pair<std::string, int>, double> values;

  std::optional<double> find(const std::string& symbol, int year) const;
  std::optional<int> first_year(const std::string& symbol) const;
  bool has_symbol(const std::string& symbol) const { return first_year(symbol).has_value(); }
  std::size_t size() const { return values.size(); }
  bool operator==(const PredictionTable&) const = default;
};

/// Trained annual-ratio learner and what is needed to interpret its output.
/// Ratios and year-end closes are normalized per symbol with statistics from
/// the training years only.
struct AnnualLearner {
  LstmParams params;
  PredictionTable table;
  std::vector<std::string> ratio_names;
  std::map<std::string, NormStats> ratio_stats;
  std::map<std::string, NormStats> close_stats;  // single column "close"
  int last_training_year = 0;

  /// Table entry converted to currency units.
  std::optional<double> predicted_close(const std::string& symbol, int year) const;
  bool operator==(const AnnualLearner&) const = default;
};

/// Stage-labelled failure from train_ensemble.
class StageError : public Error {
 public:
  StageError(int stage, const std::string& what)
      : Error("stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

/// Years whose year-end close falls on or before `train_end` (Dec 31 rule).
int last_complete_year(const Date& train_end);

/// Stage 1. Each included symbol contributes one sample per training year:
/// the normalized ratio rows from its first year up to that year, with the
/// normalized year-end close of that year as target. Symbols with fewer than
/// two years, or with no training year that has a known close, are excluded
/// with a warning and listed in `excluded`. The table is then filled for every
/// year of every included symbol from the prefix ending at that year.
AnnualLearner train_learner1(const std::map<std::string, AnnualFrame>& annual, int last_training_year,
                             const LstmTrainConfig& config, std::vector<std::string>* excluded = nullptr,
                             std::vector<double>* loss_history = nullptr);

inline const std::string kInjectedFeature = "l1_pred";

/// Appends (or overwrites) the `l1_pred` column: every day receives the table
/// entry of the year chosen by `rule`. Throws DataError listing every missing
/// (symbol, year).
DailyFrame inject_feature(DailyFrame daily, const PredictionTable& table, const AlignmentRule& rule);

/// Learner-2 feature order.
const std::vector<std::string>& ensemble_features();
/// The eight daily features without the injected prediction.
const std::vector<std::string>& daily_features();

struct EnsembleConfig {
  LstmTrainConfig learner1;
  LstmTrainConfig learner2;
  std::size_t window_length = 22;
  AlignmentRule alignment;
  int last_training_year = 0;

  EnsembleConfig();
  void validate() const;
};

struct EnsembleModel {
  AnnualLearner learner1;
  LstmParams learner2;
  std::vector<std::string> features;
  std::map<std::string, NormStats> daily_stats;  // per symbol, over `features`
  AlignmentRule alignment;
  std::size_t window_length = 0;

  bool operator==(const EnsembleModel&) const = default;
};

struct TrainingHistory {
  std::vector<double> learner1;
  std::vector<double> learner2;
};

/// Two sequential stages: train_learner1, then inject_feature and train the
/// daily learner on windows of the nine features. `daily_train` holds the
/// training partitions (raw units, eight daily features).
EnsembleModel train_ensemble(const std::map<std::string, DailyFrame>& daily_train,
                             const std::map<std::string, AnnualFrame>& annual, const EnsembleConfig& config,
                             TrainingHistory* history = nullptr);

/// Stage 2 alone, reusing an already trained annual learner.
EnsembleModel train_learner2(const std::map<std::string, DailyFrame>& daily_train, AnnualLearner learner1,
                             const EnsembleConfig& config, std::vector<double>* loss_history = nullptr);

/// Injected and normalized learner-2 windows for one symbol's raw frame.
WindowedDataset ensemble_windows(const EnsembleModel& model, const DailyFrame& raw);

/// Next-day close in currency units from the last `window_length` rows of
/// `recent` (raw units, eight daily features).
double predict_next_close(const EnsembleModel& model, const std::string& symbol, const DailyFrame& recent);

}  // namespace twofreq
