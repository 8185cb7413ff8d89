#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "twofreq/date.hpp"
#include "twofreq/ingest.hpp"
#include "twofreq/matrix.hpp"

namespace twofreq {

enum class ImputeStrategy { mean, regression };

inline constexpr std::size_t kAllRows = std::numeric_limits<std::size_t>::max();

/// Fills every missing value. Statistics and regression fits use only the
/// first `fit_rows` rows (the training range).
///
/// `mean` fills with the column's mean. `regression` fits an ordinary
/// least-squares model (with intercept) of the column on the columns that are
/// complete, and falls back to the mean when there is no complete covariate or
/// fewer than two usable rows. A column with no observed value is an error.
DailyFrame impute(DailyFrame frame, ImputeStrategy strategy, std::size_t fit_rows = kAllRows);
AnnualFrame impute(AnnualFrame frame, ImputeStrategy strategy, std::size_t fit_rows = kAllRows);

/// Column-level primitive behind both overloads. `fit` marks rows usable for
/// fitting; it must have one entry per row.
void impute_columns(std::vector<std::vector<double>>& columns, std::span<const std::string> names,
                    ImputeStrategy strategy, const std::vector<bool>& fit);

/// Per-column z-score statistics with population standard deviation.
struct NormStats {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t index_of(const std::string& name) const;  // throws DataError
  bool constant(std::size_t i) const { return stddev[i] == 0.0; }
  /// (x - mean) / stddev; 0 for constant columns.
  double normalize(std::size_t i, double x) const;
  double denormalize(std::size_t i, double z) const;

  bool operator==(const NormStats&) const = default;
};

NormStats fit_stats(std::span<const std::string> names, std::span<const std::vector<double>> columns);
NormStats fit_normalize(const DailyFrame& frame, std::span<const std::string> columns);
/// Normalizes the columns named in `stats`; other columns are left untouched.
DailyFrame apply_normalize(DailyFrame frame, const NormStats& stats);
std::vector<double> denormalize(std::span<const double> values, const NormStats& stats, const std::string& column);

struct SplitSpec {
  Date train_start, train_end, test_start, test_end;
  /// Throws ConfigError unless train_start <= train_end < test_start <= test_end.
  void validate() const;
};

struct SplitFrames {
  DailyFrame train;
  DailyFrame test;
};

/// Partitions by inclusive date ranges. Rows outside both ranges are discarded.
SplitFrames split_by_date(const DailyFrame& frame, const SplitSpec& spec);

/// N windows of T consecutive timesteps with F features each, stored
/// contiguously as [N][T][F], plus the one-step-ahead target of each window.
struct WindowedDataset {
  std::size_t window_length = 0;
  std::vector<std::string> feature_names;
  std::vector<double> inputs;
  std::vector<double> targets;
  NormStats stats;                   // empty for pooled datasets
  std::vector<std::size_t> group;    // source series of each window (pooled datasets)
  std::vector<std::size_t> target_row;  // row of the target within its source frame

  std::size_t size() const { return targets.size(); }
  std::size_t features() const { return feature_names.size(); }
  MatrixView window(std::size_t i) const;
};

/// Windows over an already-normalized frame, stride 1: window i covers rows
/// [i, i + T) and its target is `target_column` at row i + T.
WindowedDataset make_windows(const DailyFrame& normalized, const NormStats& stats,
                             std::span<const std::string> feature_names, std::size_t window_length,
                             const std::string& target_column = "close");

/// Concatenates datasets with identical features and window length. The
/// result carries no stats; `group` records the index of the source dataset.
WindowedDataset merge(std::span<const WindowedDataset> parts);

}  // namespace twofreq
