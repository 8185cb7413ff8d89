// Independent reference implementations used by the tests. They follow the
// textbook formulas directly and share no code with the library.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// EMA seeded with the first value, written as the explicit weighted sum
// (1-a)^t x_0 + sum_{k=1..t} a (1-a)^(t-k) x_k.
inline std::vector<double> ema_closed_form(const std::vector<double>& x, int period) {
  const double a = 2.0 / (period + 1.0);
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    double s = std::pow(1.0 - a, static_cast<double>(t)) * x[0];
    for (std::size_t k = 1; k <= t; ++k) s += a * std::pow(1.0 - a, static_cast<double>(t - k)) * x[k];
    out[t] = s;
  }
  return out;
}

struct Macd {
  std::vector<double> macd, signal;
};

inline Macd macd(const std::vector<double>& close, int fast = 12, int slow = 26, int signal = 9) {
  const auto f = ema_closed_form(close, fast);
  const auto s = ema_closed_form(close, slow);
  Macd m;
  for (std::size_t t = 0; t < close.size(); ++t) m.macd.push_back(f[t] - s[t]);
  m.signal = ema_closed_form(m.macd, signal);
  return m;
}

// Spreadsheet-style RSI: every output cell is recomputed from the raw closes.
// Step one uses simple averages of the first `period` gains and losses; every
// later step applies "previous average * (period-1) + current, over period".
inline std::vector<double> rsi(const std::vector<double>& close, int period = 14) {
  std::vector<double> out(close.size(), nan);
  const auto n = static_cast<std::size_t>(period);
  for (std::size_t row = n; row < close.size(); ++row) {
    double gain = 0.0, loss = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double d = close[k] - close[k - 1];
      if (d > 0) gain += d;
      else loss -= d;
    }
    gain /= period;
    loss /= period;
    for (std::size_t k = n + 1; k <= row; ++k) {
      const double d = close[k] - close[k - 1];
      gain = (gain * (period - 1) + (d > 0 ? d : 0.0)) / period;
      loss = (loss * (period - 1) + (d < 0 ? -d : 0.0)) / period;
    }
    if (loss == 0.0) out[row] = gain == 0.0 ? 50.0 : 100.0;
    else out[row] = 100.0 - 100.0 / (1.0 + gain / loss);
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double population_variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace oracle
