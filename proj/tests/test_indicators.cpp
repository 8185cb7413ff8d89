#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "twofreq/error.hpp"
#include "twofreq/indicators.hpp"
#include "twofreq/rng.hpp"

using namespace twofreq;

namespace {

std::vector<double> random_walk(Rng& rng, std::size_t n) {
  std::vector<double> x{100.0};
  for (std::size_t i = 1; i < n; ++i) x.push_back(x.back() + rng.normal());
  return x;
}

}  // namespace

TEST_CASE("EMA matches the closed-form weighted sum") {
  Rng rng(5);
  const auto x = random_walk(rng, 300);
  const auto expected = oracle::ema_closed_form(x, 12);
  EmaState ema(12);
  for (std::size_t t = 0; t < x.size(); ++t) CHECK(*ema.update(x[t]) == doctest::Approx(expected[t]).epsilon(1e-12));
}

TEST_CASE("EMA with SMA seed is undefined until period values arrive") {
  EmaState ema(3, EmaSeed::sma);
  CHECK_FALSE(ema.update(1.0).has_value());
  CHECK_FALSE(ema.update(2.0).has_value());
  CHECK(*ema.update(3.0) == 2.0);
  CHECK(*ema.update(6.0) == doctest::Approx(4.0));
}

TEST_CASE("EMA rejects non-finite input") {
  EmaState ema(5);
  CHECK_THROWS_AS(ema.update(std::nan("")), DataError);
}

TEST_CASE("ema_step leaves the input state untouched") {
  EmaState s(4);
  s.update(1.0);
  const auto [next, value] = ema_step(s, 2.0);
  CHECK(*s.current() == 1.0);
  CHECK(*value == doctest::Approx(1.4));
  CHECK(*next.current() == doctest::Approx(1.4));
}

TEST_CASE("MACD and signal match the oracle") {
  Rng rng(8);
  const auto x = random_walk(rng, 200);
  const auto expected = oracle::macd(x);
  const auto got = macd_series(x);
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(got[t].macd == doctest::Approx(expected.macd[t]).epsilon(1e-10));
    CHECK(got[t].signal == doctest::Approx(expected.signal[t]).epsilon(1e-10));
    CHECK(got[t].histogram == doctest::Approx(got[t].macd - got[t].signal));
  }
}

TEST_CASE("MACD of a constant series is zero") {
  const std::vector<double> x(60, 42.0);
  for (const auto& m : macd_series(x)) {
    CHECK(m.macd == 0.0);
    CHECK(m.signal == 0.0);
  }
}

TEST_CASE("RSI matches the spreadsheet oracle") {
  Rng rng(13);
  const auto x = random_walk(rng, 250);
  const auto expected = oracle::rsi(x);
  const auto got = rsi_series(x);
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (t < 14) {
      CHECK(is_missing(got[t]));
    } else {
      CHECK(got[t] == doctest::Approx(expected[t]).epsilon(1e-10));
    }
  }
}

TEST_CASE("RSI edge cases") {
  std::vector<double> up(30), flat(30, 5.0), down(30);
  for (std::size_t i = 0; i < 30; ++i) {
    up[i] = 1.0 + i;
    down[i] = 100.0 - i;
  }
  CHECK(rsi_series(up).back() == 100.0);
  CHECK(rsi_series(flat).back() == 50.0);
  CHECK(rsi_series(down).back() == 0.0);
  CHECK(rsi_from_averages(0.0, 0.0) == 50.0);
  CHECK(rsi_from_averages(1.0, 1.0) == 50.0);
}

TEST_CASE("short series gives an all-undefined RSI") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  for (double v : rsi_series(x)) CHECK(is_missing(v));
}

TEST_CASE("RSI from a textbook table") {
  // 15 closes: the first-step average gain and loss over 14 deltas.
  const std::vector<double> x{44.34, 44.09, 44.15, 43.61, 44.33, 44.83, 45.10, 45.42,
                              45.84, 46.08, 45.89, 46.03, 45.61, 46.28, 46.28};
  double gain = 0, loss = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - x[i - 1];
    (d > 0 ? gain : loss) += std::abs(d);
  }
  const double rs = (gain / 14) / (loss / 14);
  CHECK(rsi_series(x).back() == doctest::Approx(100 - 100 / (1 + rs)).epsilon(1e-12));
  CHECK(rsi_series(x).back() == doctest::Approx(70.46).epsilon(1e-3));
}

TEST_CASE("append_indicators backfills warmup") {
  Rng rng(2);
  DailyFrame f;
  f.symbol = "X";
  const auto close = random_walk(rng, 50);
  for (int i = 0; i < 50; ++i) f.dates.push_back(Date::from_days(16000 + i));
  f.set_column("close", close);
  const std::size_t warmup = append_indicators(f);
  CHECK(warmup == 14);
  const auto& rsi = f.column("rsi");
  for (std::size_t i = 0; i < warmup; ++i) CHECK(rsi[i] == rsi[warmup]);
  CHECK(f.size() == 50);
  CHECK(f.column("macd")[0] == 0.0);
}

TEST_CASE("append_indicators drop policy removes warmup rows") {
  Rng rng(2);
  DailyFrame f;
  f.symbol = "X";
  for (int i = 0; i < 50; ++i) f.dates.push_back(Date::from_days(16000 + i));
  f.set_column("close", random_walk(rng, 50));
  IndicatorOptions options;
  options.warmup = WarmupPolicy::drop;
  append_indicators(f, options);
  CHECK(f.size() == 36);
  for (double v : f.column("rsi")) CHECK_FALSE(is_missing(v));
}

TEST_CASE("EMA small cases") {
  CHECK(EmaState(12).smoothing() == doctest::Approx(2.0 / 13.0));
  EmaState half(3);
  CHECK(*half.update(2.0) == 2.0);
  CHECK(*half.update(4.0) == 3.0);
  EmaState flat(7);
  for (int i = 0; i < 20; ++i) CHECK(*flat.update(5.0) == 5.0);
}

TEST_CASE("EMA stays within the observed range") {
  Rng rng(31);
  const auto x = random_walk(rng, 500);
  EmaState ema(9);
  double lo = x[0], hi = x[0];
  for (double v : x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const double e = *ema.update(v);
    CHECK(e >= lo - 1e-12);
    CHECK(e <= hi + 1e-12);
  }
}

TEST_CASE("MACD of a linear ramp matches brute force to 1e-12") {
  std::vector<double> ramp;
  for (int i = 1; i <= 60; ++i) ramp.push_back(i);
  const auto expected = oracle::macd(ramp);
  const auto got = macd_series(ramp);
  for (std::size_t t = 0; t < ramp.size(); ++t) CHECK(std::abs(got[t].macd - expected.macd[t]) < 1e-12);
  const std::vector<double> one{10.0};
  CHECK(macd_series(one)[0].macd == 0.0);
  CHECK_THROWS(macd_series(std::vector<double>{}));
}

TEST_CASE("RSI of alternating deltas is 50") {
  std::vector<double> x{10.0};
  for (int i = 0; i < 40; ++i) x.push_back(x.back() + (i % 2 ? -1.0 : 1.0));
  const auto r = rsi_series(x);
  CHECK(r[14] == doctest::Approx(50.0));
}

TEST_CASE("RSI on a fixed 20-point walk matches the oracle") {
  const std::vector<double> x{50.0, 50.8, 50.1, 51.3, 52.0, 51.2, 51.9, 53.1, 52.4, 52.2,
                              53.5, 54.1, 53.0, 52.7, 53.9, 55.2, 54.4, 54.9, 53.8, 54.6};
  const auto expected = oracle::rsi(x);
  const auto got = rsi_series(x);
  for (std::size_t t = 14; t < x.size(); ++t) CHECK(std::abs(got[t] - expected[t]) < 1e-10);
}
