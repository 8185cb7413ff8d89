#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "twofreq/ensemble.hpp"
#include "twofreq/error.hpp"
#include "twofreq/variants.hpp"

using namespace twofreq;

namespace {

DailyFrame dated_frame(const std::string& symbol, std::vector<Date> dates) {
  DailyFrame f;
  f.symbol = symbol;
  f.dates = std::move(dates);
  f.set_column("close", std::vector<double>(f.dates.size(), 1.0));
  return f;
}

}  // namespace

TEST_CASE("last complete year follows the Dec 31 rule") {
  CHECK(last_complete_year(Date{2015, 12, 31}) == 2015);
  CHECK(last_complete_year(Date{2015, 12, 30}) == 2014);
  CHECK(last_complete_year(Date{2015, 8, 7}) == 2014);
}

TEST_CASE("inject_feature broadcasts the yearly value to every day") {
  PredictionTable t;
  t.values[{"A", 2014}] = 0.25;
  t.values[{"A", 2015}] = -1.5;
  const auto f = inject_feature(dated_frame("A", {Date{2014, 3, 3}, Date{2014, 12, 31}, Date{2015, 1, 2}}), t, {});
  CHECK(f.column(kInjectedFeature) == std::vector<double>{0.25, 0.25, -1.5});
}

TEST_CASE("lagged alignment uses the previous year") {
  PredictionTable t;
  t.values[{"A", 2014}] = 0.25;
  t.values[{"A", 2015}] = -1.5;
  const AlignmentRule lagged{AlignmentMode::lagged, false};
  const auto f = inject_feature(dated_frame("A", {Date{2015, 6, 1}}), t, lagged);
  CHECK(f.column(kInjectedFeature)[0] == 0.25);
}

TEST_CASE("inject_feature reports every missing year") {
  PredictionTable t;
  t.values[{"A", 2015}] = 1.0;
  try {
    inject_feature(dated_frame("A", {Date{2013, 1, 2}, Date{2014, 1, 2}, Date{2015, 1, 2}}), t, {});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("(A, 2013)") != std::string::npos);
    CHECK(what.find("(A, 2014)") != std::string::npos);
  }
}

TEST_CASE("extend_first_year fills dates before the first covered year") {
  PredictionTable t;
  t.values[{"A", 2015}] = 1.0;
  const AlignmentRule rule{AlignmentMode::same_year, true};
  const auto f = inject_feature(dated_frame("A", {Date{2013, 1, 2}, Date{2015, 1, 2}}), t, rule);
  CHECK(f.column(kInjectedFeature) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("inject_feature is idempotent") {
  PredictionTable t;
  t.values[{"A", 2014}] = 0.5;
  const auto once = inject_feature(dated_frame("A", {Date{2014, 5, 5}}), t, {});
  const auto twice = inject_feature(once, t, {});
  CHECK(twice.names == once.names);
  CHECK(twice.columns == once.columns);
}

TEST_CASE("ensemble feature list is the daily list plus the injected column") {
  CHECK(daily_features().size() == 8);
  CHECK(ensemble_features().size() == 9);
  CHECK(ensemble_features().back() == kInjectedFeature);
}

TEST_CASE("learner 1 excludes symbols with a single year") {
  const auto data = fixtures::drift_data(3);
  auto annual = data.annual;
  AnnualFrame& a = annual.begin()->second;
  const std::string dropped = a.symbol;
  a.years.resize(1);
  a.period_ends.resize(1);
  a.target_close.resize(1);
  Matrix one(1, a.ratios.cols());
  for (std::size_t c = 0; c < one.cols(); ++c) one(0, c) = a.ratios(0, c);
  a.ratios = one;
  std::vector<std::string> excluded;
  LstmTrainConfig c;
  c.hidden = 3;
  c.epochs = 2;
  const auto learner = train_learner1(annual, 2014, c, &excluded);
  CHECK(excluded == std::vector<std::string>{dropped});
  CHECK_FALSE(learner.table.has_symbol(dropped));
}

TEST_CASE("learner 1 fills the table for every year of every symbol") {
  const auto data = fixtures::drift_data(3);
  LstmTrainConfig c;
  c.hidden = 3;
  c.epochs = 2;
  const auto learner = train_learner1(data.annual, 2014, c);
  std::size_t years = 0;
  for (const auto& [symbol, frame] : data.annual) years += frame.size();
  CHECK(learner.table.size() == years);
  CHECK(learner.last_training_year == 2014);
}

TEST_CASE("constant prices are predicted within 2%") {
  const auto data = fixtures::constant_data();
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  for (const auto& [symbol, test] : data.test) {
    const double price = test.column("close").front();
    const double predicted = predict_next_close(model, symbol, test);
    CHECK(std::abs(predicted - price) <= 0.02 * price);
  }
}

TEST_CASE("prediction for an unknown symbol is an error naming it") {
  const auto data = fixtures::constant_data();
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  DailyFrame recent = data.test.begin()->second;
  try {
    predict_next_close(model, "NOPE", recent);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("symbol not in model: 'NOPE'") != std::string::npos);
  }
}

TEST_CASE("too short a window is an error") {
  const auto data = fixtures::constant_data();
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  const auto& [symbol, test] = *data.test.begin();
  CHECK_THROWS_AS(predict_next_close(model, symbol, test.slice(0, 2)), DataError);
}

TEST_CASE("stage failures are labelled") {
  const auto data = fixtures::constant_data();
  try {
    train_ensemble(data.train, {}, fixtures::tiny_ensemble(2014));
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == 1);
  }
}

TEST_CASE("ensemble training is deterministic") {
  const auto data = fixtures::drift_data(3);
  const auto a = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  const auto b = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  CHECK(a == b);
}

TEST_CASE("annual prediction maps dates through the alignment rule") {
  const auto data = fixtures::drift_data(3);
  LstmTrainConfig c;
  c.hidden = 3;
  c.epochs = 2;
  const auto learner = train_learner1(data.annual, 2014, c);
  const std::string symbol = data.annual.begin()->first;
  const double v = predict_annual_close(learner, symbol, Date{2015, 3, 2}, {});
  CHECK(v == *learner.predicted_close(symbol, 2015));
}

TEST_CASE("learner 1 tracks a ratio equal to the year-end close on held-out symbols") {
  DriftOptions o;
  o.symbols = 60;
  o.ratios = 4;
  o.first_year = 2010;
  o.last_year = 2016;
  o.anchor_years = 7;
  o.informative_ratios = 1;
  o.seed = 3;
  const auto m = make_annual_drift(o);
  const auto frames = assemble_frames(m.prices, m.fundamentals, m.ratio_names);
  std::map<std::string, AnnualFrame> train, held_out;
  std::size_t k = 0;
  for (const auto& [symbol, frame] : frames.annual) (k++ % 4 == 0 ? held_out : train).emplace(symbol, frame);

  LstmTrainConfig c;
  c.hidden = 8;
  c.epochs = 150;
  c.batch_size = 8;
  c.optimizer.learning_rate = 0.01;
  const auto learner = train_learner1(train, 2016, c);

  std::vector<double> pred, ratio;
  for (const auto& [symbol, frame] : held_out) {
    std::vector<std::vector<double>> cols(frame.ratios.cols());
    for (std::size_t col = 0; col < cols.size(); ++col)
      for (std::size_t r = 0; r < frame.size(); ++r) cols[col].push_back(frame.ratios(r, col));
    const auto stats = fit_stats(frame.ratio_names, cols);
    Matrix z(frame.size(), frame.ratios.cols());
    for (std::size_t r = 0; r < z.rows(); ++r)
      for (std::size_t col = 0; col < z.cols(); ++col) z(r, col) = stats.normalize(col, frame.ratios(r, col));
    for (std::size_t r = 0; r < frame.size(); ++r) {
      pred.push_back(lstm_predict(learner.params, MatrixView{z.values().subspan(0, (r + 1) * z.cols()), r + 1, z.cols()}));
      ratio.push_back(z(r, 0));
    }
  }
  const double mp = oracle::mean(pred), mr = oracle::mean(ratio);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sxy += (pred[i] - mp) * (ratio[i] - mr);
    sxx += (pred[i] - mp) * (pred[i] - mp);
    syy += (ratio[i] - mr) * (ratio[i] - mr);
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.9);
}

TEST_CASE("learner 2 sees the nine features in the fixed order") {
  const auto data = fixtures::drift_data(2);
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  CHECK(model.features == std::vector<std::string>{"open", "high", "low", "close", "volume", "macd", "signal", "rsi",
                                                   "l1_pred"});
  CHECK(model.learner2.input_size() == 9);
  const auto& [symbol, test] = *data.test.begin();
  const auto windows = ensemble_windows(model, test);
  CHECK(windows.feature_names == model.features);
  const auto& stats = model.daily_stats.at(symbol);
  const std::size_t l1 = 8;
  const double year_value = *model.learner1.table.find(symbol, test.dates[0].year);
  CHECK(windows.window(0)(0, l1) == stats.normalize(stats.index_of("l1_pred"), year_value));
}

TEST_CASE("prediction on the last training window is within ten sigma of the mean close") {
  const auto data = fixtures::drift_data(3);
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  for (const auto& [symbol, train] : data.train) {
    const auto& stats = model.daily_stats.at(symbol);
    const std::size_t c = stats.index_of("close");
    const double p = predict_next_close(model, symbol, train);
    CHECK(std::isfinite(p));
    CHECK(std::abs(p - stats.mean[c]) <= 10 * stats.stddev[c]);
  }
}
