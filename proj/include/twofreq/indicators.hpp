#pragma once

#include <optional>
#include <span>
#include <vector>

#include "twofreq/ingest.hpp"

namespace twofreq {

enum class EmaSeed { first, sma };
enum class WarmupPolicy { backfill, drop };

/// Streaming exponential moving average with smoothing 2/(period+1).
///
/// With EmaSeed::first the first observation seeds the average. With
/// EmaSeed::sma the average is undefined until `period` observations have
/// arrived and is then seeded with their simple mean.
class EmaState {
 public:
  explicit EmaState(int period, EmaSeed seed = EmaSeed::first);

  /// Feeds one value; returns the EMA once defined. Throws DataError on a
  /// non-finite value.
  std::optional<double> update(double value);

  int period() const { return period_; }
  double smoothing() const { return smoothing_; }
  std::optional<double> current() const { return current_; }

 private:
  int period_;
  double smoothing_;
  EmaSeed seed_;
  std::optional<double> current_;
  double warmup_sum_ = 0.0;
  int warmup_count_ = 0;
};

/// Functional form of EmaState::update.
std::pair<EmaState, std::optional<double>> ema_step(EmaState state, double value);

struct MacdTriple {
  double macd = kMissing;
  double signal = kMissing;
  double histogram = kMissing;  // macd - signal
  bool defined = false;         // false during warmup
};

struct MacdParams {
  int fast = 12;
  int slow = 26;
  int signal = 9;
  EmaSeed seed = EmaSeed::first;
};

class MacdState {
 public:
  explicit MacdState(const MacdParams& params = {});
  MacdTriple update(double close);

 private:
  EmaState fast_, slow_, signal_;
};

std::vector<MacdTriple> macd_series(std::span<const double> close, const MacdParams& params = {});

/// Streaming RSI: simple averages over the first `period` deltas, Wilder
/// smoothing ((prev * (period - 1) + current) / period) afterwards.
class RsiState {
 public:
  explicit RsiState(int period = 14);

  std::optional<double> update(double close);

  int period() const { return period_; }
  double avg_gain() const { return avg_gain_; }
  double avg_loss() const { return avg_loss_; }
  bool ready() const { return ready_; }

 private:
  int period_;
  std::optional<double> previous_;
  double avg_gain_ = 0.0;
  double avg_loss_ = 0.0;
  double warmup_gain_ = 0.0;
  double warmup_loss_ = 0.0;
  int warmup_count_ = 0;
  bool ready_ = false;
};

/// RSI from averages: 100 when avg_loss == 0 and avg_gain > 0, 50 when both are 0.
double rsi_from_averages(double avg_gain, double avg_loss);

/// Undefined (warmup) entries are kMissing. A series shorter than period+1 is
/// entirely undefined and logs a warning.
std::vector<double> rsi_series(std::span<const double> close, int period = 14);

struct IndicatorOptions {
  MacdParams macd;
  int rsi_period = 14;
  WarmupPolicy warmup = WarmupPolicy::backfill;
};

/// Appends (or overwrites) `macd`, `signal` and `rsi` computed from the
/// frame's close column, then resolves warmup per the policy: backfill copies
/// the first defined value into the leading undefined entries; drop removes
/// the leading rows where any indicator is undefined. Returns the number of
/// warmup rows. The close column must be complete.
std::size_t append_indicators(DailyFrame& frame, const IndicatorOptions& options = {});

}  // namespace twofreq
