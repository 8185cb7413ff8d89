#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "twofreq/indicators.hpp"
#include "twofreq/ingest.hpp"
#include "twofreq/preprocess.hpp"

namespace twofreq {

struct PrepareOptions {
  SplitSpec split;
  IndicatorOptions indicators;
  ImputeStrategy impute = ImputeStrategy::mean;
  std::size_t window_length = 22;
  int annual_first_year = 0;  // 0 keeps every fiscal year
};

struct SymbolSummary {
  std::string symbol;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t warmup_rows = 0;
};

struct DataSummary {
  std::vector<std::string> dropped_symbols;                    // present in one dataset only
  std::vector<std::pair<std::string, std::string>> excluded;   // symbol, reason
  std::size_t invalid_price_rows = 0;
  std::vector<SymbolSummary> symbols;
  std::vector<std::pair<std::string, double>> missing_percent;  // per input column, before imputation
};

/// Output of the prepare stage: imputed daily frames with indicator columns
/// (raw units) split into train/test, and imputed annual frames. Every symbol
/// appears in all three maps.
struct PreparedData {
  std::map<std::string, DailyFrame> train;
  std::map<std::string, DailyFrame> test;
  std::map<std::string, AnnualFrame> annual;
  DataSummary summary;
};

/// restrict to the split range -> impute -> indicators -> split, per symbol;
/// annual ratios are imputed pooled across symbols. Symbols that cannot yield
/// a training and a test window, or lack two years of fundamentals, are
/// excluded and reported.
PreparedData prepare(const AssembledFrames& frames, const PrepareOptions& options);

/// Writes daily_train.csv, daily_test.csv, annual.csv, summary.json and summary.txt.
void write_prepared(const PreparedData& data, const std::filesystem::path& dir);
PreparedData read_prepared(const std::filesystem::path& dir);

inline constexpr std::size_t kReferenceTrainRows = 1408;
inline constexpr std::size_t kReferenceTestRows = 352;

/// Human-readable summary, including the deviation of the per-symbol split
/// counts from the 1408/352 reference.
std::string summary_text(const DataSummary& summary);

}  // namespace twofreq
