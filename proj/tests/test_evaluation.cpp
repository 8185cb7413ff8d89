#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "twofreq/error.hpp"
#include "twofreq/evaluation.hpp"
#include "twofreq/serialize.hpp"

using namespace twofreq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("twofreq_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("rmse of a hand-computed example") {
  const std::vector<double> pred{1, 2, 3, 4}, actual{1, 2, 3, 14};
  CHECK(rmse(pred, actual) == doctest::Approx(std::sqrt(25.0)));
  const std::vector<double> a{0, 0}, b{5, 0};
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(12.5)));
  CHECK_THROWS_AS(rmse(a, std::vector<double>{1.0}), ShapeError);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), ShapeError);
}

TEST_CASE("variant names round trip") {
  for (Variant v : kReportOrder) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS_AS(parse_variant("bogus"), ConfigError);
}

TEST_CASE("test targets are the normalized closes after the first window") {
  const auto data = fixtures::drift_data(2);
  const auto& [symbol, train] = *data.train.begin();
  const auto& test = data.test.at(symbol);
  const auto targets = test_targets(train, test, 5);
  REQUIRE(targets.size() == test.size() - 5);
  const auto& close = train.column("close");
  double mean = 0, var = 0;
  for (double c : close) mean += c;
  mean /= double(close.size());
  for (double c : close) var += (c - mean) * (c - mean);
  const double sd = std::sqrt(var / double(close.size()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    CHECK(targets[i] == doctest::Approx((test.column("close")[i + 5] - mean) / sd).epsilon(1e-12));
}

TEST_CASE("every variant is scored on the same targets and units are consistent") {
  const auto data = fixtures::drift_data(3);
  const auto result = evaluate_variants(data, fixtures::tiny_variants(2014), 42, "abc");
  REQUIRE(result.report.variants.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(result.report.variants[k].variant == kReportOrder[k]);
    CHECK(result.report.variants[k].ok);
    CHECK(result.report.variants[k].rmse.points == result.report.naive.points);
  }
  CHECK(result.report.config_fingerprint == "abc");
  CHECK(result.report.symbols == 3);

  // With a single symbol the currency RMSE is the normalized RMSE times sigma.
  PreparedData one;
  const std::string symbol = data.train.begin()->first;
  one.train[symbol] = data.train.at(symbol);
  one.test[symbol] = data.test.at(symbol);
  one.annual[symbol] = data.annual.at(symbol);
  one.annual.insert(*std::next(data.annual.begin()));
  const auto r = evaluate_variants(one, fixtures::tiny_variants(2014), 42);
  const auto& close = one.train.at(symbol).column("close");
  double mean = 0, var = 0;
  for (double c : close) mean += c;
  mean /= double(close.size());
  for (double c : close) var += (c - mean) * (c - mean);
  const double sd = std::sqrt(var / double(close.size()));
  for (const auto& v : r.report.variants) {
    if (!v.ok) continue;
    CHECK(v.rmse.currency_pooled == doctest::Approx(v.rmse.normalized_pooled * sd).epsilon(1e-9));
  }
}

TEST_CASE("report formats carry every variant") {
  const auto data = fixtures::drift_data(2);
  const auto result = evaluate_variants(data, fixtures::tiny_variants(2014), 1);
  const auto json = report_json(result.report);
  const auto table = report_table(result.report);
  for (Variant v : kReportOrder) {
    CHECK(json.find("\"" + variant_name(v) + "\"") != std::string::npos);
    CHECK(table.find(variant_label(v)) != std::string::npos);
  }
}

TEST_CASE("forecast CSV round trip") {
  const auto data = fixtures::drift_data(2);
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  const auto& [symbol, test] = *data.test.begin();
  const auto series = forecast_series(model, test);
  CHECK(series.dates.size() == test.size() - 5);
  CHECK(series.predicted[0] == predict_next_close(model, symbol, test.slice(0, 5)));

  const auto dir = scratch("forecast");
  emit_plot_data(series, dir / symbol);
  CHECK(fs::exists(dir / (symbol + ".svg")));
  const auto back = read_forecast_csv(dir / (symbol + ".csv"), symbol);
  CHECK(back == series);
  std::ifstream svg(dir / (symbol + ".svg"));
  std::string first;
  std::getline(svg, first);
  CHECK(first.find("<svg") != std::string::npos);
}

TEST_CASE("forecasts only ever read observed history") {
  const auto data = fixtures::drift_data(2);
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  const auto& [symbol, test] = *data.test.begin();
  const auto series = forecast_series(model, test);
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    CHECK(series.dates[i] == test.dates[i + 5]);
    CHECK(series.actual[i] == test.column("close")[i + 5]);
    CHECK(series.predicted[i] == predict_next_close(model, symbol, test.slice(i, i + 5)));
  }
  CHECK_THROWS_AS(forecast_series(model, test.slice(0, 5)), DataError);
}

TEST_CASE("constant series forecasts stay within 2%") {
  const auto data = fixtures::constant_data();
  const auto model = train_ensemble(data.train, data.annual, fixtures::tiny_ensemble(2014));
  for (const auto& [symbol, test] : data.test) {
    const auto series = forecast_series(model, test);
    for (std::size_t i = 0; i < series.dates.size(); ++i)
      CHECK(std::abs(series.predicted[i] - series.actual[i]) <= 0.02 * series.actual[i]);
  }
}

TEST_CASE("identical seed and data give an identical report") {
  const auto data = fixtures::drift_data(2);
  const auto a = evaluate_variants(data, fixtures::tiny_variants(2014), 9);
  const auto b = evaluate_variants(data, fixtures::tiny_variants(2014), 9);
  CHECK(a.report == b.report);
  CHECK(report_json(a.report) == report_json(b.report));
}
