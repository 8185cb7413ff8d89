#include "twofreq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "twofreq/csv.hpp"
#include "twofreq/rng.hpp"

namespace twofreq {
namespace {

std::string ticker(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "SYN%03zu", i + 1);
  return buf;
}

// OHLCV around a close path; keeps low <= open, close <= high.
void emit_prices(SyntheticMarket& market, const std::string& symbol, std::span<const Date> dates,
                 std::span<const double> close, double spread, Rng& rng) {
  double prev = close[0];
  for (std::size_t t = 0; t < dates.size(); ++t) {
    const double c = close[t];
    const double o = prev + 0.3 * (c - prev);
    const double hi = std::max(o, c) + std::abs(rng.normal()) * spread;
    const double lo = std::min(o, c) - std::abs(rng.normal()) * spread;
    PriceRow row;
    row.date = dates[t];
    row.symbol = symbol;
    row.open = o;
    row.high = hi;
    row.low = lo;
    row.close = c;
    row.volume = std::round(1e6 * std::exp(0.2 * rng.normal()));
    market.prices.push_back(std::move(row));
    prev = c;
  }
}

void emit_fundamentals(SyntheticMarket& market, const std::string& symbol, int first_year, int last_year,
                       const std::function<double(int)>& year_end_close, Rng& rng, std::size_t informative = 0,
                       double ratio_noise = 0.0) {
  const std::size_t n = market.ratio_names.size();
  for (int y = first_year; y <= last_year; ++y) {
    FundamentalsRow row;
    row.symbol = symbol;
    row.fiscal_year = y;
    row.period_end = Date{y, 12, 31};
    row.ratios.resize(n);
    if (n > 0) row.ratios[0] = year_end_close(y);
    for (std::size_t k = 1; k < n; ++k)
      row.ratios[k] = k < informative ? year_end_close(y) * std::exp(ratio_noise * rng.normal()) : rng.normal();
    market.fundamentals.push_back(std::move(row));
  }
}

}  // namespace

std::vector<std::string> synthetic_ratio_names(std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= count; ++k) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "ratio_%02zu", k);
    names.emplace_back(buf);
  }
  return names;
}

std::vector<Date> business_days(int first_year, int last_year) {
  std::vector<Date> out;
  const long begin = Date{first_year, 1, 1}.days_since_epoch();
  const long end = Date{last_year, 12, 31}.days_since_epoch();
  for (long d = begin; d <= end; ++d) {
    const Date date = Date::from_days(d);
    const int wd = date.weekday();
    if (wd != 0 && wd != 6) out.push_back(date);
  }
  return out;
}

SyntheticMarket make_annual_drift(const DriftOptions& o) {
  SyntheticMarket market;
  market.ratio_names = synthetic_ratio_names(o.ratios);
  const std::vector<Date> dates = business_days(o.first_year, o.last_year);
  Rng rng(o.seed);
  for (std::size_t s = 0; s < o.symbols; ++s) {
    const std::string symbol = ticker(s);
    const double base = rng.uniform(20.0, 200.0);
    const bool up = rng.uniform() < 0.5;
    std::vector<double> level;
    for (int y = o.first_year; y <= o.last_year; ++y) {
      if (level.size() < std::max<std::size_t>(o.anchor_years, 1)) {
        // Alternating sides of the base keep the anchors at least level_spread apart.
        const double side = (level.size() % 2 == 0) == up ? 1.0 : -1.0;
        level.push_back(base * (1.0 + side * rng.uniform(0.5 * o.level_spread, o.level_spread)));
      } else {
        const auto [lo, hi] = std::minmax_element(level.begin(), level.begin() + static_cast<long>(o.anchor_years));
        level.push_back(rng.uniform(*lo, *hi));
      }
    }

    std::vector<double> close(dates.size());
    double c = level[0];
    for (std::size_t t = 0; t < dates.size(); ++t) {
      const double L = level[static_cast<std::size_t>(dates[t].year - o.first_year)];
      const bool year_end = t + 1 == dates.size() || dates[t + 1].year != dates[t].year;
      c = year_end ? L : c + o.reversion * (L - c) + o.noise * base * rng.normal();
      close[t] = c;
    }
    emit_prices(market, symbol, dates, close, 0.2 * o.noise * base, rng);
    emit_fundamentals(
        market, symbol, o.first_year, o.last_year,
        [&](int y) { return level[static_cast<std::size_t>(y - o.first_year)]; }, rng, o.informative_ratios,
        o.ratio_noise);
  }
  return market;
}

SplitSpec drift_split(const DriftOptions& o) {
  return {Date{o.first_year, 1, 1}, Date{o.last_year - 1, 6, 30}, Date{o.last_year - 1, 7, 1},
          Date{o.last_year, 12, 31}};
}

SyntheticMarket make_constant(const ConstantOptions& o) {
  SyntheticMarket market;
  market.ratio_names = synthetic_ratio_names(o.ratios);
  const std::vector<Date> dates = business_days(o.first_year, o.last_year);
  Rng rng(o.seed);
  for (std::size_t s = 0; s < o.symbols; ++s) {
    const std::string symbol = ticker(s);
    const double price = std::round(rng.uniform(20.0, 200.0) * 100.0) / 100.0;
    for (const Date& d : dates) {
      PriceRow row;
      row.date = d;
      row.symbol = symbol;
      row.open = row.high = row.low = row.close = price;
      row.volume = 1e6;
      market.prices.push_back(std::move(row));
    }
    emit_fundamentals(market, symbol, o.first_year, o.last_year, [&](int) { return price; }, rng);
  }
  return market;
}

std::vector<std::vector<double>> make_ar1(const Ar1Options& o) {
  Rng rng(o.seed);
  std::vector<std::vector<double>> out(o.series);
  for (auto& x : out) {
    x.resize(o.length);
    x[0] = rng.uniform(-1.0, 1.0);
    for (std::size_t t = 1; t < o.length; ++t) x[t] = o.phi * x[t - 1] + o.noise * rng.normal();
  }
  return out;
}

WindowedDataset ar1_windows(std::span<const std::vector<double>> series, std::size_t window_length) {
  WindowedDataset ds;
  ds.window_length = window_length;
  ds.feature_names = {"x"};
  for (std::size_t g = 0; g < series.size(); ++g) {
    const auto& x = series[g];
    for (std::size_t i = 0; i + window_length < x.size(); ++i) {
      ds.inputs.insert(ds.inputs.end(), x.begin() + static_cast<long>(i),
                       x.begin() + static_cast<long>(i + window_length));
      ds.targets.push_back(x[i + window_length]);
      ds.group.push_back(g);
      ds.target_row.push_back(i + window_length);
    }
  }
  return ds;
}

SyntheticMarket make_ar1_market(std::size_t symbols, int first_year, int last_year, double phi, std::uint64_t seed) {
  SyntheticMarket market;
  market.ratio_names = synthetic_ratio_names(75);
  const std::vector<Date> dates = business_days(first_year, last_year);
  Rng rng(seed);
  for (std::size_t s = 0; s < symbols; ++s) {
    const std::string symbol = ticker(s);
    const double base = rng.uniform(20.0, 200.0);
    std::vector<double> close(dates.size());
    double x = rng.uniform(-1.0, 1.0);
    for (std::size_t t = 0; t < dates.size(); ++t) {
      close[t] = base * (1.0 + 0.05 * x);
      x = phi * x + std::sqrt(1.0 - phi * phi) * rng.normal();
    }
    emit_prices(market, symbol, dates, close, 0.001 * base, rng);
    emit_fundamentals(
        market, symbol, first_year, last_year,
        [&](int y) {
          double last = close.front();
          for (std::size_t t = 0; t < dates.size(); ++t)
            if (dates[t].year == y) last = close[t];
          return last;
        },
        rng);
  }
  return market;
}

void write_prices_csv(std::ostream& out, std::span<const PriceRow> rows) {
  const auto cell = [](const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string(); };
  out << "date,symbol,open,high,low,close,volume\n";
  for (const auto& r : rows)
    out << r.date.to_string() << ',' << csv::quote(r.symbol) << ',' << cell(r.open) << ',' << cell(r.high) << ','
        << cell(r.low) << ',' << cell(r.close) << ',' << cell(r.volume) << '\n';
}

void write_fundamentals_csv(std::ostream& out, std::span<const FundamentalsRow> rows,
                            std::span<const std::string> ratio_names) {
  out << "symbol,period_end";
  for (const auto& n : ratio_names) out << ',' << csv::quote(n);
  out << '\n';
  for (const auto& r : rows) {
    out << csv::quote(r.symbol) << ',' << r.period_end.to_string();
    for (double v : r.ratios) out << ',' << csv::format_number(v);
    out << '\n';
  }
}

}  // namespace twofreq
