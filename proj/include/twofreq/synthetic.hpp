#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "twofreq/ingest.hpp"
#include "twofreq/preprocess.hpp"

namespace twofreq {

/// Raw rows in the shape the two CSV files produce.
struct SyntheticMarket {
  std::vector<PriceRow> prices;
  std::vector<FundamentalsRow> fundamentals;
  std::vector<std::string> ratio_names;
};

/// ratio_01 .. ratio_NN
std::vector<std::string> synthetic_ratio_names(std::size_t count);

/// Monday-to-Friday dates from Jan 1 of `first_year` to Dec 31 of `last_year`.
std::vector<Date> business_days(int first_year, int last_year);

/// Each symbol s has a base price B_s and, for every year y, a level L_{s,y}.
/// The first `anchor_years` levels alternate sides of B_s at a distance of
/// 0.5 to 1 times level_spread * B_s; later levels are drawn uniformly between
/// the smallest and largest anchor. The close reverts to the level of its
/// year, c_t = c_{t-1} + reversion (L - c_{t-1}) + noise B_s e_t, and the last
/// business day of each year closes exactly at L_{s,y}. ratio_01 is that
/// year-end close, ratio_02 .. ratio_{informative_ratios} are the year-end
/// close times lognormal noise, and the remaining ratios are independent noise.
struct DriftOptions {
  std::size_t symbols = 20;
  int first_year = 2013;
  int last_year = 2016;
  std::size_t ratios = 75;
  double reversion = 0.05;
  double noise = 0.002;
  double level_spread = 0.25;
  std::size_t anchor_years = 2;
  std::size_t informative_ratios = 75;
  double ratio_noise = 0.05;
  std::uint64_t seed = 1;
};

SyntheticMarket make_annual_drift(const DriftOptions& options);

/// Training runs to mid-way through the second-to-last year; the test range
/// covers the rest, including one year boundary.
SplitSpec drift_split(const DriftOptions& options);

/// Every symbol trades flat at its own constant price.
struct ConstantOptions {
  std::size_t symbols = 4;
  int first_year = 2012;
  int last_year = 2016;
  std::size_t ratios = 75;
  std::uint64_t seed = 1;
};

SyntheticMarket make_constant(const ConstantOptions& options);

/// x_{t+1} = phi x_t + noise e_t with x_0 uniform in [-1, 1].
struct Ar1Options {
  std::size_t series = 200;
  std::size_t length = 30;
  double phi = 0.9;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

std::vector<std::vector<double>> make_ar1(const Ar1Options& options);

/// Single-feature windows of every series, stride 1; `group` is the series index.
WindowedDataset ar1_windows(std::span<const std::vector<double>> series, std::size_t window_length);

/// Price market whose close is B_s (1 + scale x_t) for an AR(1) path x.
SyntheticMarket make_ar1_market(std::size_t symbols, int first_year, int last_year, double phi, std::uint64_t seed);

void write_prices_csv(std::ostream& out, std::span<const PriceRow> rows);
void write_fundamentals_csv(std::ostream& out, std::span<const FundamentalsRow> rows,
                            std::span<const std::string> ratio_names);

}  // namespace twofreq
