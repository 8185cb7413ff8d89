#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twofreq/ensemble.hpp"
#include "twofreq/mlp.hpp"
#include "twofreq/pipeline.hpp"
#include "twofreq/variants.hpp"

namespace twofreq {

/// sqrt(mean((pred - actual)^2)). Throws ShapeError on length mismatch or empty input.
double rmse(std::span<const double> pred, std::span<const double> actual);

enum class Variant { daily, annual, ensemble, mlp };

/// Row order of the comparison table.
inline constexpr Variant kReportOrder[] = {Variant::daily, Variant::annual, Variant::ensemble, Variant::mlp};

std::string variant_name(Variant v);   // daily | annual | ensemble | mlp
std::string variant_label(Variant v);  // table heading
Variant parse_variant(const std::string& name);  // throws ConfigError
/// Published RMSE of the comparable configuration, for annotation only.
double reference_rmse(Variant v);

struct RmseSummary {
  double normalized_pooled = 0.0;
  double normalized_symbol_mean = 0.0;
  double currency_pooled = 0.0;
  double currency_symbol_mean = 0.0;
  std::size_t points = 0;
  bool operator==(const RmseSummary&) const = default;
};

struct VariantResult {
  Variant variant = Variant::daily;
  bool ok = false;
  std::string error;
  RmseSummary rmse;
  bool operator==(const VariantResult&) const = default;
};

struct EvalReport {
  std::vector<VariantResult> variants;  // kReportOrder
  RmseSummary naive;                    // predict-last-value baseline
  std::uint64_t seed = 0;
  std::string config_fingerprint;
  std::size_t symbols = 0;
  std::vector<std::string> notes;
  bool operator==(const EvalReport&) const = default;
};

struct VariantConfigs {
  EnsembleConfig ensemble;
  LstmTrainConfig daily;
  MlpTrainConfig mlp;
};

/// One symbol's test-range predictions from each variant, normalized units.
struct TestPredictions {
  std::string symbol;
  std::vector<Date> dates;
  std::vector<double> targets;
  std::vector<double> naive;
  std::vector<std::optional<std::vector<double>>> variants;  // kReportOrder; nullopt when failed
};

struct EvaluationResult {
  EvalReport report;
  std::optional<EnsembleModel> ensemble;
  std::vector<TestPredictions> predictions;
};

/// Trains every variant on the training partitions and scores all of them on
/// the same test windows (stride 1 over each symbol's test frame). A variant
/// that throws is marked failed; the others proceed.
EvaluationResult evaluate_variants(const PreparedData& data, const VariantConfigs& configs, std::uint64_t seed,
                                   const std::string& config_fingerprint = {});

/// Normalized next-close targets of a symbol's test frame, shared by all variants.
std::vector<double> test_targets(const DailyFrame& train_raw, const DailyFrame& test_raw, std::size_t window_length);

std::string report_json(const EvalReport& report);
/// Plain-text table with one column per variant, mirroring the published layout.
std::string report_table(const EvalReport& report);

struct ForecastSeries {
  std::string symbol;
  std::vector<Date> dates;
  std::vector<double> actual;     // currency units
  std::vector<double> predicted;  // currency units
  bool operator==(const ForecastSeries&) const = default;
};

/// One-step-ahead predictions over a raw test frame; inputs always come from
/// observed history. N rows with window T give N - T points.
ForecastSeries forecast_series(const EnsembleModel& model, const DailyFrame& test_raw);

/// CSV `date,actual,predicted`.
void write_forecast_csv(const ForecastSeries& series, const std::filesystem::path& path);
ForecastSeries read_forecast_csv(const std::filesystem::path& path, const std::string& symbol = {});
void write_forecast_svg(const ForecastSeries& series, const std::filesystem::path& path);
/// Writes <stem>.csv and <stem>.svg.
void emit_plot_data(const ForecastSeries& series, const std::filesystem::path& stem);

}  // namespace twofreq
