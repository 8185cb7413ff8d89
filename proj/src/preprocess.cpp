#include "twofreq/preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "twofreq/error.hpp"
#include "twofreq/log.hpp"

namespace twofreq {
namespace {

std::vector<bool> leading_rows(std::size_t n, std::size_t fit_rows) {
  std::vector<bool> fit(n, false);
  std::fill(fit.begin(), fit.begin() + static_cast<long>(std::min(n, fit_rows)), true);
  return fit;
}

double observed_mean(const std::vector<double>& col, const std::vector<bool>& fit, const std::string& name) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < col.size(); ++i)
    if (fit[i] && !is_missing(col[i])) {
      sum += col[i];
      ++n;
    }
  if (n > 0) return sum / static_cast<double>(n);
  for (double v : col)
    if (!is_missing(v)) {
      sum += v;
      ++n;
    }
  if (n == 0) throw DataError("column " + name + " entirely missing");
  log::warn("impute: column '", name, "' has no observation in the fitting range; using the full-range mean");
  return sum / static_cast<double>(n);
}

}  // namespace

void impute_columns(std::vector<std::vector<double>>& columns, std::span<const std::string> names,
                    ImputeStrategy strategy, const std::vector<bool>& fit) {
  const std::size_t ncols = columns.size();
  std::vector<bool> complete(ncols);
  for (std::size_t c = 0; c < ncols; ++c)
    complete[c] = std::none_of(columns[c].begin(), columns[c].end(), is_missing);

  std::vector<std::size_t> covariates;
  for (std::size_t c = 0; c < ncols; ++c)
    if (complete[c]) covariates.push_back(c);

  std::vector<std::vector<double>> filled(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    if (complete[c]) continue;
    const auto& col = columns[c];
    filled[c] = col;
    const double mean = observed_mean(col, fit, names[c]);

    bool done = false;
    if (strategy == ImputeStrategy::regression && !covariates.empty()) {
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < col.size(); ++r)
        if (fit[r] && !is_missing(col[r])) rows.push_back(r);
      if (rows.size() >= 2) {
        const auto p = static_cast<Eigen::Index>(covariates.size() + 1);
        Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), p);
        Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          design(ii, 0) = 1.0;
          for (std::size_t k = 0; k < covariates.size(); ++k)
            design(ii, static_cast<Eigen::Index>(k + 1)) = columns[covariates[k]][rows[i]];
          y(ii) = col[rows[i]];
        }
        const Eigen::VectorXd beta = design.completeOrthogonalDecomposition().solve(y);
        for (std::size_t r = 0; r < col.size(); ++r) {
          if (!is_missing(col[r])) continue;
          double pred = beta(0);
          for (std::size_t k = 0; k < covariates.size(); ++k)
            pred += beta(static_cast<Eigen::Index>(k + 1)) * columns[covariates[k]][r];
          filled[c][r] = std::isfinite(pred) ? pred : mean;
        }
        done = true;
      }
    }
    if (!done)
      for (auto& v : filled[c])
        if (is_missing(v)) v = mean;
  }
  for (std::size_t c = 0; c < ncols; ++c)
    if (!complete[c]) columns[c] = std::move(filled[c]);
}

DailyFrame impute(DailyFrame frame, ImputeStrategy strategy, std::size_t fit_rows) {
  frame.validate();
  impute_columns(frame.columns, frame.names, strategy, leading_rows(frame.size(), fit_rows));
  return frame;
}

AnnualFrame impute(AnnualFrame frame, ImputeStrategy strategy, std::size_t fit_rows) {
  frame.validate();
  const std::size_t rows = frame.ratios.rows(), cols = frame.ratios.cols();
  std::vector<std::vector<double>> columns(cols, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) columns[c][r] = frame.ratios(r, c);
  impute_columns(columns, frame.ratio_names, strategy, leading_rows(rows, fit_rows));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) frame.ratios(r, c) = columns[c][r];
  return frame;
}

std::size_t NormStats::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError("normalization stats have no column '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double NormStats::normalize(std::size_t i, double x) const {
  return stddev[i] == 0.0 ? 0.0 : (x - mean[i]) / stddev[i];
}

double NormStats::denormalize(std::size_t i, double z) const { return z * stddev[i] + mean[i]; }

NormStats fit_stats(std::span<const std::string> names, std::span<const std::vector<double>> columns) {
  NormStats stats;
  stats.names.assign(names.begin(), names.end());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = columns[c];
    if (col.empty()) throw DataError("cannot fit normalization on empty column '" + names[c] + "'");
    double sum = 0.0;
    for (double v : col) {
      if (is_missing(v)) throw DataError("cannot fit normalization: column '" + names[c] + "' has missing values");
      sum += v;
    }
    const double mean = sum / static_cast<double>(col.size());
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    stats.mean.push_back(mean);
    stats.stddev.push_back(std::sqrt(ss / static_cast<double>(col.size())));
  }
  return stats;
}

NormStats fit_normalize(const DailyFrame& frame, std::span<const std::string> columns) {
  std::vector<std::vector<double>> cols;
  for (const auto& name : columns) cols.push_back(frame.column(name));
  return fit_stats(columns, cols);
}

DailyFrame apply_normalize(DailyFrame frame, const NormStats& stats) {
  for (std::size_t i = 0; i < stats.names.size(); ++i) {
    if (!frame.has(stats.names[i]))
      throw DataError("normalization stats column '" + stats.names[i] + "' not in frame '" + frame.symbol + "'");
    for (double& v : frame.column(stats.names[i])) v = stats.normalize(i, v);
  }
  return frame;
}

std::vector<double> denormalize(std::span<const double> values, const NormStats& stats, const std::string& column) {
  const std::size_t i = stats.index_of(column);
  std::vector<double> out;
  out.reserve(values.size());
  for (double z : values) out.push_back(stats.denormalize(i, z));
  return out;
}

void SplitSpec::validate() const {
  if (train_end < train_start) throw ConfigError("split: train_end before train_start");
  if (!(train_end < test_start)) throw ConfigError("split: test_start must be after train_end");
  if (test_end < test_start) throw ConfigError("split: test_end before test_start");
}

SplitFrames split_by_date(const DailyFrame& frame, const SplitSpec& spec) {
  spec.validate();
  const auto lower = [&](const Date& d) {
    return static_cast<std::size_t>(std::lower_bound(frame.dates.begin(), frame.dates.end(), d) - frame.dates.begin());
  };
  const auto upper = [&](const Date& d) {
    return static_cast<std::size_t>(std::upper_bound(frame.dates.begin(), frame.dates.end(), d) - frame.dates.begin());
  };
  SplitFrames out{frame.slice(lower(spec.train_start), upper(spec.train_end)),
                  frame.slice(lower(spec.test_start), upper(spec.test_end))};
  if (out.train.size() == 0) throw DataError("'" + frame.symbol + "': empty training partition");
  if (out.test.size() == 0) throw DataError("'" + frame.symbol + "': empty test partition");
  return out;
}

MatrixView WindowedDataset::window(std::size_t i) const {
  const std::size_t stride = window_length * features();
  return {std::span<const double>(inputs).subspan(i * stride, stride), window_length, features()};
}

WindowedDataset make_windows(const DailyFrame& normalized, const NormStats& stats,
                             std::span<const std::string> feature_names, std::size_t window_length,
                             const std::string& target_column) {
  if (window_length == 0) throw ConfigError("window length must be at least 1");
  const std::size_t n = normalized.size();
  if (n < window_length + 1)
    throw DataError("'" + normalized.symbol + "': " + std::to_string(n) + " rows is too short for window length " +
                    std::to_string(window_length));

  std::vector<const std::vector<double>*> cols;
  for (const auto& name : feature_names) cols.push_back(&normalized.column(name));
  const auto& target = normalized.column(target_column);
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (std::any_of(cols[c]->begin(), cols[c]->end(), is_missing))
      throw DataError("'" + normalized.symbol + "': column '" + feature_names[c] + "' has missing values");
  if (std::any_of(target.begin(), target.end(), is_missing))
    throw DataError("'" + normalized.symbol + "': target column has missing values");

  WindowedDataset ds;
  ds.window_length = window_length;
  ds.feature_names.assign(feature_names.begin(), feature_names.end());
  ds.stats = stats;
  const std::size_t count = n - window_length;
  const std::size_t f = cols.size();
  ds.inputs.resize(count * window_length * f);
  ds.targets.resize(count);
  ds.group.assign(count, 0);
  ds.target_row.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double* out = ds.inputs.data() + i * window_length * f;
    for (std::size_t t = 0; t < window_length; ++t)
      for (std::size_t c = 0; c < f; ++c) out[t * f + c] = (*cols[c])[i + t];
    ds.targets[i] = target[i + window_length];
    ds.target_row[i] = i + window_length;
  }
  return ds;
}

WindowedDataset merge(std::span<const WindowedDataset> parts) {
  WindowedDataset out;
  if (parts.empty()) return out;
  out.window_length = parts.front().window_length;
  out.feature_names = parts.front().feature_names;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    if (part.window_length != out.window_length || part.feature_names != out.feature_names)
      throw ShapeError("merge: datasets disagree on window length or features");
    out.inputs.insert(out.inputs.end(), part.inputs.begin(), part.inputs.end());
    out.targets.insert(out.targets.end(), part.targets.begin(), part.targets.end());
    out.target_row.insert(out.target_row.end(), part.target_row.begin(), part.target_row.end());
    out.group.insert(out.group.end(), part.size(), p);
  }
  return out;
}

}  // namespace twofreq
