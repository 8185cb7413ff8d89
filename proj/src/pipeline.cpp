#include "twofreq/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "twofreq/ensemble.hpp"
#include "twofreq/error.hpp"
#include "twofreq/log.hpp"

namespace twofreq {
namespace {

using nlohmann::json;

double percent(std::size_t part, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(total);
}

std::vector<std::pair<std::string, double>> missing_summary(const AssembledFrames& frames) {
  std::vector<std::pair<std::string, double>> out;
  std::size_t rows = 0;
  std::vector<std::size_t> missing(ohlcv_columns().size(), 0);
  for (const auto& [_, frame] : frames.daily) {
    rows += frame.size();
    for (std::size_t c = 0; c < missing.size(); ++c)
      missing[c] += static_cast<std::size_t>(std::count_if(frame.columns[c].begin(), frame.columns[c].end(), is_missing));
  }
  for (std::size_t c = 0; c < missing.size(); ++c) out.emplace_back(ohlcv_columns()[c], percent(missing[c], rows));

  if (frames.annual.empty()) return out;
  const auto& names = frames.annual.begin()->second.ratio_names;
  std::vector<std::size_t> rmissing(names.size(), 0);
  std::size_t years = 0;
  for (const auto& [_, frame] : frames.annual) {
    years += frame.size();
    for (std::size_t r = 0; r < frame.size(); ++r)
      for (std::size_t c = 0; c < names.size(); ++c)
        if (is_missing(frame.ratios(r, c))) ++rmissing[c];
  }
  for (std::size_t c = 0; c < names.size(); ++c) out.emplace_back(names[c], percent(rmissing[c], years));
  return out;
}

template <typename Map>
std::vector<typename Map::mapped_type> values_of(const Map& m) {
  std::vector<typename Map::mapped_type> out;
  for (const auto& [_, v] : m) out.push_back(v);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace

PreparedData prepare(const AssembledFrames& frames, const PrepareOptions& options) {
  options.split.validate();
  const SplitSpec& split = options.split;
  PreparedData out;
  out.summary.dropped_symbols = frames.dropped_symbols;
  out.summary.invalid_price_rows = frames.invalid_price_rows;
  out.summary.missing_percent = missing_summary(frames);

  const auto exclude = [&](const std::string& symbol, std::string reason) {
    log::warn("prepare: '", symbol, "' excluded: ", reason);
    out.summary.excluded.emplace_back(symbol, std::move(reason));
  };

  std::map<std::string, SymbolSummary> daily_ok;
  for (const auto& [symbol, raw] : frames.daily) {
    const auto lo = std::lower_bound(raw.dates.begin(), raw.dates.end(), split.train_start) - raw.dates.begin();
    const auto hi = std::upper_bound(raw.dates.begin(), raw.dates.end(), split.test_end) - raw.dates.begin();
    DailyFrame frame = raw.slice(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
    const auto fit_rows = static_cast<std::size_t>(
        std::upper_bound(frame.dates.begin(), frame.dates.end(), split.train_end) - frame.dates.begin());
    if (fit_rows == 0) {
      exclude(symbol, "no rows in the training range");
      continue;
    }
    try {
      frame = impute(std::move(frame), options.impute, fit_rows);
      const std::size_t warmup = append_indicators(frame, options.indicators);
      SplitFrames parts = split_by_date(frame, split);
      if (parts.train.size() < options.window_length + 1 || parts.test.size() < options.window_length + 1) {
        exclude(symbol, "fewer than window_length + 1 rows in a partition");
        continue;
      }
      daily_ok[symbol] = SymbolSummary{symbol, parts.train.size(), parts.test.size(), warmup};
      out.train.emplace(symbol, std::move(parts.train));
      out.test.emplace(symbol, std::move(parts.test));
    } catch (const DataError& e) {
      exclude(symbol, e.what());
    }
  }

  // Annual ratios: restrict years, then impute pooled across symbols.
  const int last_train_year = last_complete_year(split.train_end);
  std::vector<AnnualFrame> annual;
  for (const auto& [symbol, raw] : frames.annual) {
    if (!daily_ok.count(symbol)) continue;
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < raw.size(); ++r)
      if (raw.years[r] >= options.annual_first_year) keep.push_back(r);
    if (keep.size() < 2) {
      exclude(symbol, "fewer than two years of fundamentals");
      continue;
    }
    const bool has_target = std::any_of(keep.begin(), keep.end(), [&](std::size_t r) {
      return raw.years[r] <= last_train_year && !is_missing(raw.target_close[r]);
    });
    if (!has_target) {
      exclude(symbol, "no training year with a known year-end close");
      continue;
    }
    AnnualFrame frame;
    frame.symbol = symbol;
    frame.ratio_names = raw.ratio_names;
    frame.ratios = Matrix(keep.size(), raw.ratio_names.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      frame.years.push_back(raw.years[keep[i]]);
      frame.period_ends.push_back(raw.period_ends[keep[i]]);
      frame.target_close.push_back(raw.target_close[keep[i]]);
      std::copy(raw.ratios.row(keep[i]).begin(), raw.ratios.row(keep[i]).end(), frame.ratios.row(i).begin());
    }
    annual.push_back(std::move(frame));
  }
  if (annual.empty()) throw DataError("prepare: no symbol survived preprocessing");

  const std::size_t ncols = annual.front().ratio_names.size();
  std::vector<std::vector<double>> columns(ncols);
  std::vector<bool> fit;
  for (const auto& frame : annual)
    for (std::size_t r = 0; r < frame.size(); ++r) {
      for (std::size_t c = 0; c < ncols; ++c) columns[c].push_back(frame.ratios(r, c));
      fit.push_back(frame.years[r] <= last_train_year);
    }
  impute_columns(columns, annual.front().ratio_names, options.impute, fit);
  std::size_t offset = 0;
  for (auto& frame : annual) {
    for (std::size_t r = 0; r < frame.size(); ++r)
      for (std::size_t c = 0; c < ncols; ++c) frame.ratios(r, c) = columns[c][offset + r];
    offset += frame.size();
    out.summary.symbols.push_back(daily_ok.at(frame.symbol));
    out.annual.emplace(frame.symbol, std::move(frame));
  }

  for (auto it = out.train.begin(); it != out.train.end();) {
    if (out.annual.count(it->first)) {
      ++it;
    } else {
      out.test.erase(it->first);
      it = out.train.erase(it);
    }
  }
  return out;
}

void write_prepared(const PreparedData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "daily_train.csv", std::ios::binary);
    write_daily_csv(f, values_of(data.train));
  }
  {
    std::ofstream f(dir / "daily_test.csv", std::ios::binary);
    write_daily_csv(f, values_of(data.test));
  }
  {
    std::ofstream f(dir / "annual.csv", std::ios::binary);
    write_annual_csv(f, values_of(data.annual));
  }

  const DataSummary& s = data.summary;
  json j;
  j["dropped_symbols"] = s.dropped_symbols;
  j["excluded"] = json::array();
  for (const auto& [symbol, reason] : s.excluded) j["excluded"].push_back({{"symbol", symbol}, {"reason", reason}});
  j["invalid_price_rows"] = s.invalid_price_rows;
  j["symbols"] = json::array();
  for (const auto& row : s.symbols)
    j["symbols"].push_back({{"symbol", row.symbol},
                            {"train_rows", row.train_rows},
                            {"test_rows", row.test_rows},
                            {"warmup_rows", row.warmup_rows}});
  j["missing_percent"] = json::array();
  for (const auto& [name, pct] : s.missing_percent) j["missing_percent"].push_back({{"column", name}, {"percent", pct}});
  j["reference_split_rows"] = {{"train", kReferenceTrainRows}, {"test", kReferenceTestRows}};
  write_file(dir / "summary.json", j.dump(2) + "\n");
  write_file(dir / "summary.txt", summary_text(s));
}

PreparedData read_prepared(const std::filesystem::path& dir) {
  const auto open = [&](const char* name) {
    std::ifstream f(dir / name, std::ios::binary);
    if (!f) throw Error("prepared data not found: " + (dir / name).string() + " (run `prepare` first)");
    return f;
  };
  PreparedData data;
  {
    auto f = open("daily_train.csv");
    data.train = read_daily_csv(f);
  }
  {
    auto f = open("daily_test.csv");
    data.test = read_daily_csv(f);
  }
  {
    auto f = open("annual.csv");
    data.annual = read_annual_csv(f);
  }
  std::ifstream sf(dir / "summary.json");
  if (sf) {
    const json j = json::parse(sf);
    for (const auto& row : j.at("symbols"))
      data.summary.symbols.push_back(SymbolSummary{row.at("symbol"), row.at("train_rows"), row.at("test_rows"),
                                                   row.at("warmup_rows")});
    data.summary.dropped_symbols = j.at("dropped_symbols").get<std::vector<std::string>>();
    data.summary.invalid_price_rows = j.at("invalid_price_rows");
    for (const auto& row : j.at("excluded")) data.summary.excluded.emplace_back(row.at("symbol"), row.at("reason"));
    for (const auto& row : j.at("missing_percent"))
      data.summary.missing_percent.emplace_back(row.at("column"), row.at("percent"));
  }
  for (const auto& [symbol, _] : data.train)
    if (!data.test.count(symbol) || !data.annual.count(symbol))
      throw DataError("prepared data inconsistent: '" + symbol + "' missing from test or annual files");
  return data;
}

std::string summary_text(const DataSummary& summary) {
  std::ostringstream os;
  os << "symbols prepared: " << summary.symbols.size() << "\n";
  os << "symbols dropped (one dataset only): " << summary.dropped_symbols.size() << "\n";
  os << "symbols excluded: " << summary.excluded.size() << "\n";
  for (const auto& [symbol, reason] : summary.excluded) os << "  " << symbol << ": " << reason << "\n";
  os << "price rows dropped for invariant violations: " << summary.invalid_price_rows << "\n";

  if (!summary.symbols.empty()) {
    std::size_t max_train = 0, max_test = 0, total_train = 0, total_test = 0;
    for (const auto& s : summary.symbols) {
      max_train = std::max(max_train, s.train_rows);
      max_test = std::max(max_test, s.test_rows);
      total_train += s.train_rows;
      total_test += s.test_rows;
    }
    os << "rows: train " << total_train << ", test " << total_test << " (all symbols)\n";
    os << "rows per full-history symbol: train " << max_train << ", test " << max_test << "\n";
    const auto delta = [](std::size_t a, std::size_t b) {
      const long d = static_cast<long>(a) - static_cast<long>(b);
      return (d >= 0 ? "+" : "") + std::to_string(d);
    };
    os << "reference split 1408/352: deviation train " << delta(max_train, kReferenceTrainRows) << ", test "
       << delta(max_test, kReferenceTestRows) << " (informational)\n";
  }
  os << "missing values before imputation (%):\n";
  for (const auto& [name, pct] : summary.missing_percent) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", pct);
    os << "  " << name << ": " << buf << "\n";
  }
  return os.str();
}

}  // namespace twofreq
