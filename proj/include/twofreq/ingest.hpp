#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "twofreq/date.hpp"
#include "twofreq/matrix.hpp"

namespace twofreq {

/// Missing-value marker used inside frames. Rows carry std::optional instead.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

struct PriceRow {
  Date date;
  std::string symbol;
  std::optional<double> open, high, low, close, volume;
  std::size_t line = 0;  // source line, for diagnostics
};

/// Returns a description of the first violated price invariant, if any.
std::optional<std::string> check_price_row(const PriceRow& row);

struct FundamentalsRow {
  std::string symbol;
  int fiscal_year = 0;
  Date period_end;
  std::vector<double> ratios;  // ordered per the ratio-name list; kMissing where absent
};

/// Column names in prices.csv.
struct PriceSchema {
  std::string date = "date";
  std::string symbol = "symbol";
  std::string open = "open";
  std::string high = "high";
  std::string low = "low";
  std::string close = "close";
  std::string volume = "volume";
  DateFormat date_format = DateFormat::iso;
};

/// Key columns in fundamentals.csv. Every other column is a candidate ratio.
struct FundamentalsSchema {
  std::string symbol = "symbol";
  std::string period_end = "period_end";
  DateFormat date_format = DateFormat::iso;
};

/// Per-symbol daily series. Columns are named and share the date vector's length.
struct DailyFrame {
  std::string symbol;
  std::vector<Date> dates;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t size() const { return dates.size(); }
  bool has(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws DataError
  const std::vector<double>& column(const std::string& name) const;
  std::vector<double>& column(const std::string& name);
  /// Adds the column, or overwrites it when a column of that name exists.
  void set_column(const std::string& name, std::vector<double> values);
  /// Rows [begin, end).
  DailyFrame slice(std::size_t begin, std::size_t end) const;
  /// Throws ShapeError when a column length disagrees with the dates.
  void validate() const;
};

/// Per-symbol yearly fundamentals: one row of ratios per fiscal year.
struct AnnualFrame {
  std::string symbol;
  std::vector<int> years;
  std::vector<Date> period_ends;
  std::vector<std::string> ratio_names;
  Matrix ratios;                      // years x ratio_names
  std::vector<double> target_close;   // last trading-day close of each year, kMissing if unknown

  std::size_t size() const { return years.size(); }
  void validate() const;
};

std::vector<PriceRow> parse_prices(std::istream& in, const PriceSchema& schema = {});

/// Ratio columns are those of the header other than the key columns and
/// unnamed index columns, in file order.
std::vector<std::string> infer_ratio_names(std::istream& in, const FundamentalsSchema& schema = {});

std::vector<FundamentalsRow> parse_fundamentals(std::istream& in, std::span<const std::string> ratio_names,
                                                const FundamentalsSchema& schema = {});

struct AssembledFrames {
  std::map<std::string, DailyFrame> daily;
  std::map<std::string, AnnualFrame> annual;
  std::vector<std::string> dropped_symbols;  // present in only one dataset
  std::size_t invalid_price_rows = 0;        // dropped for violating price invariants
};

/// Groups rows by symbol, sorts by date/year and keeps the symbols present in
/// both datasets. Daily columns: open, high, low, close, volume.
AssembledFrames assemble_frames(std::span<const PriceRow> prices, std::span<const FundamentalsRow> fundamentals,
                                std::span<const std::string> ratio_names);

/// Long-format CSV: date,symbol,<columns...>. Missing values are empty cells.
void write_daily_csv(std::ostream& out, std::span<const DailyFrame> frames);
std::map<std::string, DailyFrame> read_daily_csv(std::istream& in);

/// symbol,fiscal_year,period_end,target_close,<ratios...>
void write_annual_csv(std::ostream& out, std::span<const AnnualFrame> frames);
std::map<std::string, AnnualFrame> read_annual_csv(std::istream& in);

inline const std::vector<std::string>& ohlcv_columns() {
  static const std::vector<std::string> names{"open", "high", "low", "close", "volume"};
  return names;
}

}  // namespace twofreq
