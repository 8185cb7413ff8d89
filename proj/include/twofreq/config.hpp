#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "twofreq/ensemble.hpp"
#include "twofreq/evaluation.hpp"
#include "twofreq/ingest.hpp"
#include "twofreq/pipeline.hpp"

namespace twofreq {

struct LearnerConfig {
  std::size_t hidden = 20;
  int epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.005;
  std::optional<int> patience;
};

/// Which built-in dataset to generate instead of reading CSV files.
struct SyntheticConfig {
  std::string kind;  // "", "drift", "constant" or "ar1"
  std::size_t symbols = 20;
  std::uint64_t seed = 7;
};

struct RunConfig {
  std::filesystem::path prices = "data/prices.csv";
  std::filesystem::path fundamentals = "data/fundamentals.csv";
  PriceSchema price_schema;
  FundamentalsSchema fundamentals_schema;
  std::vector<std::string> ratio_names;  // empty: every non-key column of fundamentals.csv

  SplitSpec split{Date{2010, 1, 4}, Date{2015, 8, 7}, Date{2015, 8, 8}, Date{2016, 12, 31}};
  std::size_t window_length = 22;
  IndicatorOptions indicators;
  ImputeStrategy impute = ImputeStrategy::mean;
  int annual_first_year = 0;

  LearnerConfig learner1{20, 100, 32, 0.005, std::nullopt};
  LearnerConfig learner2{200, 100, 32, 0.005, std::nullopt};
  LearnerConfig daily{200, 100, 32, 0.005, std::nullopt};
  LearnerConfig mlp{10, 100, 32, 0.005, std::nullopt};
  OptimizerConfig optimizer;

  std::uint64_t seed = 42;
  AlignmentRule alignment{AlignmentMode::same_year, true};
  std::filesystem::path out = "out";
  SyntheticConfig synthetic;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Defaults, then the synthetic preset (when `synthetic_kind` is non-empty),
/// then the JSON document `file_text` (may be empty). Unknown keys and
/// ill-typed values throw ConfigError naming the field.
RunConfig load_config(const std::string& file_text, const std::string& synthetic_kind = "");

/// Preset for the built-in datasets: small networks and few epochs.
void apply_synthetic_preset(RunConfig& config, const std::string& kind);

std::string config_to_json(const RunConfig& config);
/// FNV-1a over the effective config without the output directory.
std::string config_fingerprint(const RunConfig& config);

/// Seeds derive from the run seed: learner 1 +0, learner 2 +1, daily +2, mlp +3.
VariantConfigs variant_configs(const RunConfig& config);
PrepareOptions prepare_options(const RunConfig& config);

}  // namespace twofreq
