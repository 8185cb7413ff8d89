#include "twofreq/indicators.hpp"

#include <algorithm>
#include <cmath>

#include "twofreq/error.hpp"
#include "twofreq/log.hpp"

namespace twofreq {

EmaState::EmaState(int period, EmaSeed seed)
    : period_(period), smoothing_(2.0 / (period + 1.0)), seed_(seed) {
  if (period < 1) throw ConfigError("EMA period must be positive");
}

std::optional<double> EmaState::update(double value) {
  if (!std::isfinite(value)) throw DataError("EMA input is not finite");
  if (current_) {
    current_ = value * smoothing_ + *current_ * (1.0 - smoothing_);
  } else if (seed_ == EmaSeed::first) {
    current_ = value;
  } else {
    warmup_sum_ += value;
    if (++warmup_count_ == period_) current_ = warmup_sum_ / period_;
  }
  return current_;
}

std::pair<EmaState, std::optional<double>> ema_step(EmaState state, double value) {
  auto out = state.update(value);
  return {std::move(state), out};
}

MacdState::MacdState(const MacdParams& params)
    : fast_(params.fast, params.seed), slow_(params.slow, params.seed), signal_(params.signal, params.seed) {}

MacdTriple MacdState::update(double close) {
  const auto fast = fast_.update(close);
  const auto slow = slow_.update(close);
  MacdTriple out;
  if (!fast || !slow) return out;
  out.macd = *fast - *slow;
  if (const auto signal = signal_.update(out.macd)) {
    out.signal = *signal;
    out.histogram = out.macd - out.signal;
    out.defined = true;
  }
  return out;
}

std::vector<MacdTriple> macd_series(std::span<const double> close, const MacdParams& params) {
  if (close.empty()) throw DataError("macd_series: empty input");
  MacdState state(params);
  std::vector<MacdTriple> out;
  out.reserve(close.size());
  for (double c : close) out.push_back(state.update(c));
  return out;
}

RsiState::RsiState(int period) : period_(period) {
  if (period < 1) throw ConfigError("RSI period must be positive");
}

double rsi_from_averages(double avg_gain, double avg_loss) {
  if (avg_loss == 0.0) return avg_gain == 0.0 ? 50.0 : 100.0;
  return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
}

std::optional<double> RsiState::update(double close) {
  if (!std::isfinite(close)) throw DataError("RSI input is not finite");
  if (!previous_) {
    previous_ = close;
    return std::nullopt;
  }
  const double delta = close - *previous_;
  previous_ = close;
  const double gain = delta > 0.0 ? delta : 0.0;
  const double loss = delta < 0.0 ? -delta : 0.0;
  if (!ready_) {
    warmup_gain_ += gain;
    warmup_loss_ += loss;
    if (++warmup_count_ < period_) return std::nullopt;
    avg_gain_ = warmup_gain_ / period_;
    avg_loss_ = warmup_loss_ / period_;
    ready_ = true;
  } else {
    avg_gain_ = (avg_gain_ * (period_ - 1) + gain) / period_;
    avg_loss_ = (avg_loss_ * (period_ - 1) + loss) / period_;
  }
  return rsi_from_averages(avg_gain_, avg_loss_);
}

std::vector<double> rsi_series(std::span<const double> close, int period) {
  std::vector<double> out(close.size(), kMissing);
  if (close.size() < static_cast<std::size_t>(period) + 1) {
    log::warn("rsi_series: ", close.size(), " points is shorter than period + 1 = ", period + 1,
              "; RSI undefined");
    return out;
  }
  RsiState state(period);
  for (std::size_t i = 0; i < close.size(); ++i)
    if (auto v = state.update(close[i])) out[i] = *v;
  return out;
}

std::size_t append_indicators(DailyFrame& frame, const IndicatorOptions& options) {
  const auto& close = frame.column("close");
  if (std::any_of(close.begin(), close.end(), is_missing))
    throw DataError("append_indicators: close column of '" + frame.symbol + "' has missing values");
  if (close.empty()) throw DataError("append_indicators: empty frame '" + frame.symbol + "'");

  const auto triples = macd_series(close, options.macd);
  std::vector<double> macd(close.size()), signal(close.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    macd[i] = triples[i].macd;
    signal[i] = triples[i].signal;
  }
  auto rsi = rsi_series(close, options.rsi_period);
  if (std::all_of(rsi.begin(), rsi.end(), is_missing)) {
    log::warn("'", frame.symbol, "': RSI undefined for the whole series, using neutral 50");
    std::fill(rsi.begin(), rsi.end(), 50.0);
  }

  std::size_t warmup = 0;
  for (const auto* col : {&macd, &signal, &rsi}) {
    const auto first = std::find_if(col->begin(), col->end(), [](double v) { return !is_missing(v); });
    warmup = std::max(warmup, static_cast<std::size_t>(first - col->begin()));
  }
  if (warmup >= close.size())
    throw DataError("'" + frame.symbol + "': series too short for indicator warmup");

  frame.set_column("macd", std::move(macd));
  frame.set_column("signal", std::move(signal));
  frame.set_column("rsi", std::move(rsi));

  if (options.warmup == WarmupPolicy::drop) {
    if (warmup > 0) frame = frame.slice(warmup, frame.size());
  } else {
    for (const char* name : {"macd", "signal", "rsi"}) {
      auto& col = frame.column(name);
      const auto first = std::find_if(col.begin(), col.end(), [](double v) { return !is_missing(v); });
      std::fill(col.begin(), first, *first);
    }
  }
  return warmup;
}

}  // namespace twofreq
