#include "twofreq/ingest.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "twofreq/csv.hpp"
#include "twofreq/error.hpp"
#include "twofreq/log.hpp"

namespace twofreq {
namespace {

using Header = std::map<std::string, std::size_t>;

Header read_header(std::istream& in, std::size_t& line_number, std::vector<std::string>* ordered = nullptr) {
  std::string line;
  if (!csv::next_line(in, line, line_number)) throw DataError("empty CSV input (no header row)");
  auto fields = csv::split_record(line);
  Header header;
  for (std::size_t i = 0; i < fields.size(); ++i) header.emplace(fields[i], i);
  if (ordered) *ordered = std::move(fields);
  return header;
}

std::size_t require(const Header& header, const std::string& name) {
  auto it = header.find(name);
  if (it == header.end()) throw SchemaError(name);
  return it->second;
}

std::string_view cell(const std::vector<std::string>& fields, std::size_t i) {
  return i < fields.size() ? std::string_view(fields[i]) : std::string_view();
}

std::string trimmed(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return std::string(s);
}

std::vector<double> yearly_last_close(const DailyFrame& daily, const std::vector<int>& years) {
  std::map<int, double> last;
  const auto& close = daily.column("close");
  for (std::size_t i = 0; i < daily.size(); ++i)
    if (!is_missing(close[i])) last[daily.dates[i].year] = close[i];
  std::vector<double> out;
  out.reserve(years.size());
  for (int y : years) {
    auto it = last.find(y);
    out.push_back(it == last.end() ? kMissing : it->second);
  }
  return out;
}

}  // namespace

std::optional<std::string> check_price_row(const PriceRow& row) {
  if (row.volume && *row.volume < 0.0) return "negative volume";
  for (const auto* v : {&row.open, &row.high, &row.low, &row.close})
    if (*v && **v < 0.0) return "negative price";
  if (row.low && row.high && *row.low > *row.high) return "low > high";
  if (row.low && row.high) {
    if (row.open && (*row.open < *row.low || *row.open > *row.high)) return "open outside [low, high]";
    if (row.close && (*row.close < *row.low || *row.close > *row.high)) return "close outside [low, high]";
  }
  return std::nullopt;
}

bool DailyFrame::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::size_t DailyFrame::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError("frame '" + symbol + "' has no column '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

const std::vector<double>& DailyFrame::column(const std::string& name) const { return columns[index_of(name)]; }
std::vector<double>& DailyFrame::column(const std::string& name) { return columns[index_of(name)]; }

void DailyFrame::set_column(const std::string& name, std::vector<double> values) {
  if (values.size() != dates.size())
    throw ShapeError("column '" + name + "' has " + std::to_string(values.size()) + " values for " +
                     std::to_string(dates.size()) + " dates");
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) {
    columns[static_cast<std::size_t>(it - names.begin())] = std::move(values);
  } else {
    names.push_back(name);
    columns.push_back(std::move(values));
  }
}

DailyFrame DailyFrame::slice(std::size_t begin, std::size_t end) const {
  DailyFrame out;
  out.symbol = symbol;
  out.names = names;
  out.dates.assign(dates.begin() + static_cast<long>(begin), dates.begin() + static_cast<long>(end));
  for (const auto& col : columns)
    out.columns.emplace_back(col.begin() + static_cast<long>(begin), col.begin() + static_cast<long>(end));
  return out;
}

void DailyFrame::validate() const {
  if (names.size() != columns.size()) throw ShapeError("frame '" + symbol + "': names/columns mismatch");
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].size() != dates.size())
      throw ShapeError("frame '" + symbol + "': column '" + names[i] + "' length mismatch");
}

void AnnualFrame::validate() const {
  if (ratios.rows() != years.size() || ratios.cols() != ratio_names.size() ||
      target_close.size() != years.size() || period_ends.size() != years.size())
    throw ShapeError("annual frame '" + symbol + "': inconsistent shapes");
  for (std::size_t i = 1; i < years.size(); ++i)
    if (years[i] <= years[i - 1]) throw DataError("annual frame '" + symbol + "': years not strictly increasing");
}

std::vector<PriceRow> parse_prices(std::istream& in, const PriceSchema& schema) {
  std::size_t line_number = 0;
  const Header header = read_header(in, line_number);
  const std::size_t i_date = require(header, schema.date);
  const std::size_t i_symbol = require(header, schema.symbol);
  const std::size_t i_open = require(header, schema.open);
  const std::size_t i_high = require(header, schema.high);
  const std::size_t i_low = require(header, schema.low);
  const std::size_t i_close = require(header, schema.close);
  const std::size_t i_volume = require(header, schema.volume);

  std::vector<PriceRow> rows;
  std::string line;
  while (csv::next_line(in, line, line_number)) {
    const auto fields = csv::split_record(line);
    PriceRow row;
    row.line = line_number;
    try {
      row.date = parse_date(cell(fields, i_date), schema.date_format);
    } catch (const DateParseError& e) {
      throw RowError(line_number, e.what());
    }
    row.symbol = trimmed(cell(fields, i_symbol));
    if (row.symbol.empty()) throw RowError(line_number, "empty symbol");
    row.open = csv::parse_number(cell(fields, i_open));
    row.high = csv::parse_number(cell(fields, i_high));
    row.low = csv::parse_number(cell(fields, i_low));
    row.close = csv::parse_number(cell(fields, i_close));
    row.volume = csv::parse_number(cell(fields, i_volume));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> infer_ratio_names(std::istream& in, const FundamentalsSchema& schema) {
  std::size_t line_number = 0;
  std::vector<std::string> ordered;
  read_header(in, line_number, &ordered);
  std::vector<std::string> names;
  for (const auto& name : ordered) {
    if (name == schema.symbol || name == schema.period_end) continue;
    if (name.empty() || name.rfind("Unnamed", 0) == 0) continue;
    names.push_back(name);
  }
  return names;
}

std::vector<FundamentalsRow> parse_fundamentals(std::istream& in, std::span<const std::string> ratio_names,
                                                const FundamentalsSchema& schema) {
  std::size_t line_number = 0;
  const Header header = read_header(in, line_number);
  const std::size_t i_symbol = require(header, schema.symbol);
  const std::size_t i_period = require(header, schema.period_end);

  std::vector<std::optional<std::size_t>> ratio_index;
  for (const auto& name : ratio_names) {
    auto it = header.find(name);
    if (it == header.end()) {
      log::warn("fundamentals: column '", name, "' absent, filled as missing");
      ratio_index.emplace_back(std::nullopt);
    } else {
      ratio_index.emplace_back(it->second);
    }
  }

  std::vector<FundamentalsRow> rows;
  std::map<std::pair<std::string, int>, int> seen;
  std::string line;
  while (csv::next_line(in, line, line_number)) {
    const auto fields = csv::split_record(line);
    FundamentalsRow row;
    row.symbol = trimmed(cell(fields, i_symbol));
    if (row.symbol.empty()) throw RowError(line_number, "empty symbol");
    try {
      row.period_end = parse_date(cell(fields, i_period), schema.date_format);
    } catch (const DateParseError& e) {
      throw RowError(line_number, e.what());
    }
    row.fiscal_year = row.period_end.year;
    row.ratios.reserve(ratio_index.size());
    for (const auto& idx : ratio_index)
      row.ratios.push_back(idx ? csv::parse_number(cell(fields, *idx)).value_or(kMissing) : kMissing);
    ++seen[{row.symbol, row.fiscal_year}];
    rows.push_back(std::move(row));
  }

  std::ostringstream dups;
  for (const auto& [key, count] : seen)
    if (count > 1) dups << (dups.tellp() > 0 ? ", " : "") << "(" << key.first << ", " << key.second << ")";
  if (dups.tellp() > 0) throw DataError("duplicate (symbol, fiscal_year) rows: " + dups.str());
  return rows;
}

AssembledFrames assemble_frames(std::span<const PriceRow> prices, std::span<const FundamentalsRow> fundamentals,
                                std::span<const std::string> ratio_names) {
  AssembledFrames out;

  std::map<std::string, std::vector<const PriceRow*>> by_symbol;
  for (const auto& row : prices) {
    if (auto problem = check_price_row(row)) {
      log::warn("prices line ", row.line, " (", row.symbol, " ", row.date.to_string(), "): ", *problem,
                "; row dropped");
      ++out.invalid_price_rows;
      continue;
    }
    by_symbol[row.symbol].push_back(&row);
  }

  std::map<std::string, std::vector<const FundamentalsRow*>> fund_by_symbol;
  for (const auto& row : fundamentals) {
    if (row.ratios.size() != ratio_names.size())
      throw ShapeError("fundamentals row for '" + row.symbol + "' has " + std::to_string(row.ratios.size()) +
                       " ratios, expected " + std::to_string(ratio_names.size()));
    fund_by_symbol[row.symbol].push_back(&row);
  }

  std::set<std::string> all;
  for (const auto& [s, _] : by_symbol) all.insert(s);
  for (const auto& [s, _] : fund_by_symbol) all.insert(s);

  for (const auto& symbol : all) {
    auto p = by_symbol.find(symbol);
    auto f = fund_by_symbol.find(symbol);
    if (p == by_symbol.end() || f == fund_by_symbol.end()) {
      log::warn("symbol '", symbol, "' present only in ", p == by_symbol.end() ? "fundamentals" : "prices",
                "; dropped");
      out.dropped_symbols.push_back(symbol);
      continue;
    }

    auto rows = p->second;
    std::sort(rows.begin(), rows.end(), [](const PriceRow* a, const PriceRow* b) { return a->date < b->date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i]->date == rows[i - 1]->date)
        throw DataError("duplicate price rows for (" + symbol + ", " + rows[i]->date.to_string() + ")");

    DailyFrame daily;
    daily.symbol = symbol;
    daily.names = ohlcv_columns();
    daily.columns.assign(5, std::vector<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const PriceRow& r = *rows[i];
      daily.dates.push_back(r.date);
      daily.columns[0][i] = r.open.value_or(kMissing);
      daily.columns[1][i] = r.high.value_or(kMissing);
      daily.columns[2][i] = r.low.value_or(kMissing);
      daily.columns[3][i] = r.close.value_or(kMissing);
      daily.columns[4][i] = r.volume.value_or(kMissing);
    }

    auto frows = f->second;
    std::sort(frows.begin(), frows.end(),
              [](const FundamentalsRow* a, const FundamentalsRow* b) { return a->fiscal_year < b->fiscal_year; });
    AnnualFrame annual;
    annual.symbol = symbol;
    annual.ratio_names.assign(ratio_names.begin(), ratio_names.end());
    annual.ratios = Matrix(frows.size(), ratio_names.size());
    for (std::size_t i = 0; i < frows.size(); ++i) {
      if (i > 0 && frows[i]->fiscal_year == frows[i - 1]->fiscal_year)
        throw DataError("duplicate (symbol, fiscal_year) rows: (" + symbol + ", " +
                        std::to_string(frows[i]->fiscal_year) + ")");
      annual.years.push_back(frows[i]->fiscal_year);
      annual.period_ends.push_back(frows[i]->period_end);
      std::copy(frows[i]->ratios.begin(), frows[i]->ratios.end(), annual.ratios.row(i).begin());
    }
    annual.target_close = yearly_last_close(daily, annual.years);

    out.daily.emplace(symbol, std::move(daily));
    out.annual.emplace(symbol, std::move(annual));
  }

  if (out.daily.empty()) throw DataError("no symbols present in both prices and fundamentals");
  return out;
}

void write_daily_csv(std::ostream& out, std::span<const DailyFrame> frames) {
  if (frames.empty()) return;
  const auto& names = frames.front().names;
  out << "date,symbol";
  for (const auto& n : names) out << ',' << csv::quote(n);
  out << '\n';
  for (const auto& frame : frames) {
    frame.validate();
    if (frame.names != names) throw ShapeError("write_daily_csv: frames disagree on column names");
    for (std::size_t i = 0; i < frame.size(); ++i) {
      out << frame.dates[i].to_string() << ',' << csv::quote(frame.symbol);
      for (const auto& col : frame.columns) out << ',' << csv::format_number(col[i]);
      out << '\n';
    }
  }
}

std::map<std::string, DailyFrame> read_daily_csv(std::istream& in) {
  std::size_t line_number = 0;
  std::vector<std::string> ordered;
  read_header(in, line_number, &ordered);
  if (ordered.size() < 2 || ordered[0] != "date" || ordered[1] != "symbol")
    throw SchemaError(ordered.empty() || ordered[0] != "date" ? "date" : "symbol");
  const std::vector<std::string> names(ordered.begin() + 2, ordered.end());

  std::map<std::string, DailyFrame> frames;
  std::string line;
  while (csv::next_line(in, line, line_number)) {
    const auto fields = csv::split_record(line);
    Date date;
    try {
      date = parse_date(cell(fields, 0));
    } catch (const DateParseError& e) {
      throw RowError(line_number, e.what());
    }
    const std::string symbol(cell(fields, 1));
    auto [it, inserted] = frames.try_emplace(symbol);
    DailyFrame& frame = it->second;
    if (inserted) {
      frame.symbol = symbol;
      frame.names = names;
      frame.columns.resize(names.size());
    } else if (!(frame.dates.back() < date)) {
      throw RowError(line_number, "dates not strictly increasing for " + symbol);
    }
    frame.dates.push_back(date);
    for (std::size_t c = 0; c < names.size(); ++c)
      frame.columns[c].push_back(csv::parse_number(cell(fields, c + 2)).value_or(kMissing));
  }
  return frames;
}

void write_annual_csv(std::ostream& out, std::span<const AnnualFrame> frames) {
  if (frames.empty()) return;
  const auto& names = frames.front().ratio_names;
  out << "symbol,fiscal_year,period_end,target_close";
  for (const auto& n : names) out << ',' << csv::quote(n);
  out << '\n';
  for (const auto& frame : frames) {
    frame.validate();
    for (std::size_t i = 0; i < frame.size(); ++i) {
      out << csv::quote(frame.symbol) << ',' << frame.years[i] << ',' << frame.period_ends[i].to_string() << ','
          << csv::format_number(frame.target_close[i]);
      for (double v : frame.ratios.row(i)) out << ',' << csv::format_number(v);
      out << '\n';
    }
  }
}

std::map<std::string, AnnualFrame> read_annual_csv(std::istream& in) {
  std::size_t line_number = 0;
  std::vector<std::string> ordered;
  read_header(in, line_number, &ordered);
  static const char* kKeys[] = {"symbol", "fiscal_year", "period_end", "target_close"};
  for (std::size_t i = 0; i < 4; ++i)
    if (ordered.size() <= i || ordered[i] != kKeys[i]) throw SchemaError(kKeys[i]);
  const std::vector<std::string> names(ordered.begin() + 4, ordered.end());

  std::map<std::string, std::vector<std::vector<double>>> rows;
  std::map<std::string, AnnualFrame> frames;
  std::string line;
  while (csv::next_line(in, line, line_number)) {
    const auto fields = csv::split_record(line);
    const std::string symbol(cell(fields, 0));
    auto year = csv::parse_number(cell(fields, 1));
    if (!year) throw RowError(line_number, "bad fiscal_year");
    auto [it, inserted] = frames.try_emplace(symbol);
    AnnualFrame& frame = it->second;
    if (inserted) {
      frame.symbol = symbol;
      frame.ratio_names = names;
    }
    frame.years.push_back(static_cast<int>(*year));
    try {
      frame.period_ends.push_back(parse_date(cell(fields, 2)));
    } catch (const DateParseError& e) {
      throw RowError(line_number, e.what());
    }
    frame.target_close.push_back(csv::parse_number(cell(fields, 3)).value_or(kMissing));
    std::vector<double> r(names.size());
    for (std::size_t c = 0; c < names.size(); ++c)
      r[c] = csv::parse_number(cell(fields, c + 4)).value_or(kMissing);
    rows[symbol].push_back(std::move(r));
  }
  for (auto& [symbol, frame] : frames) {
    const auto& rs = rows[symbol];
    frame.ratios = Matrix(rs.size(), names.size());
    for (std::size_t i = 0; i < rs.size(); ++i) std::copy(rs[i].begin(), rs[i].end(), frame.ratios.row(i).begin());
    frame.validate();
  }
  return frames;
}

}  // namespace twofreq
