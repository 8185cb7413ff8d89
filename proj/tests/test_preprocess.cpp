#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "twofreq/error.hpp"
#include "twofreq/preprocess.hpp"
#include "twofreq/rng.hpp"

using namespace twofreq;

namespace {

DailyFrame frame_with(const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  DailyFrame f;
  f.symbol = "X";
  for (std::size_t i = 0; i < cols.front().second.size(); ++i) f.dates.push_back(Date::from_days(16000 + long(i)));
  for (const auto& [name, values] : cols) f.set_column(name, values);
  return f;
}

}  // namespace

TEST_CASE("mean imputation uses the fit rows only") {
  const auto nan = oracle::nan;
  auto f = frame_with({{"a", {1, 3, nan, 100}}});
  f = impute(f, ImputeStrategy::mean, 2);
  CHECK(f.column("a")[2] == 2.0);
  CHECK(f.column("a")[3] == 100.0);
}

TEST_CASE("regression imputation recovers an exact linear relation") {
  const auto nan = oracle::nan;
  auto f = frame_with({{"x", {1, 2, 3, 4, 5, 6}}, {"y", {3, 5, 7, nan, 11, nan}}});
  f = impute(f, ImputeStrategy::regression);
  CHECK(f.column("y")[3] == doctest::Approx(9.0));
  CHECK(f.column("y")[5] == doctest::Approx(13.0));
}

TEST_CASE("regression imputation falls back to the mean without a complete covariate") {
  const auto nan = oracle::nan;
  auto f = frame_with({{"x", {1, nan, 3}}, {"y", {2, 4, nan}}});
  f = impute(f, ImputeStrategy::regression);
  CHECK(f.column("x")[1] == 2.0);
  CHECK(f.column("y")[2] == 3.0);
}

TEST_CASE("column with no observed value is an error naming it") {
  const auto nan = oracle::nan;
  auto f = frame_with({{"empty", {nan, nan}}});
  try {
    impute(f, ImputeStrategy::mean);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("empty") != std::string::npos);
  }
}

TEST_CASE("z-score uses population variance") {
  auto f = frame_with({{"a", {1, 2, 3, 4}}, {"c", {7, 7, 7, 7}}});
  const std::vector<std::string> cols{"a", "c"};
  const auto stats = fit_normalize(f, cols);
  CHECK(stats.mean[0] == 2.5);
  CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(1.25)));
  CHECK(stats.constant(1));
  const auto z = apply_normalize(f, stats);
  for (double v : z.column("c")) CHECK(v == 0.0);
  CHECK(stats.denormalize(1, 0.0) == 7.0);
}

TEST_CASE("normalized columns have zero mean and unit variance") {
  Rng rng(4);
  std::vector<double> a(500), b(500);
  for (std::size_t i = 0; i < 500; ++i) {
    a[i] = rng.normal(50, 9);
    b[i] = std::exp(rng.normal());
  }
  auto f = frame_with({{"a", a}, {"b", b}});
  const std::vector<std::string> cols{"a", "b"};
  const auto z = apply_normalize(f, fit_normalize(f, cols));
  for (const auto& name : cols) {
    CHECK(std::abs(oracle::mean(z.column(name))) < 1e-9);
    CHECK(std::abs(oracle::population_variance(z.column(name)) - 1.0) < 1e-9);
  }
}

TEST_CASE("denormalize inverts normalize") {
  Rng rng(9);
  std::vector<double> a(100);
  for (auto& v : a) v = rng.normal(1e3, 250);
  auto f = frame_with({{"close", a}});
  const std::vector<std::string> cols{"close"};
  const auto stats = fit_normalize(f, cols);
  const auto z = apply_normalize(f, stats);
  const auto back = denormalize(z.column("close"), stats, "close");
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(back[i] - a[i]) <= 1e-12 * std::abs(a[i]));
}

TEST_CASE("fit_normalize rejects missing values") {
  auto f = frame_with({{"a", {1, oracle::nan}}});
  const std::vector<std::string> cols{"a"};
  CHECK_THROWS_AS(fit_normalize(f, cols), DataError);
}

TEST_CASE("split validation and partition") {
  auto f = frame_with({{"a", {0, 1, 2, 3, 4, 5}}});
  SplitSpec spec{f.dates[0], f.dates[2], f.dates[3], f.dates[4]};
  const auto parts = split_by_date(f, spec);
  CHECK(parts.train.size() == 3);
  CHECK(parts.test.size() == 2);
  CHECK(parts.test.column("a")[0] == 3.0);

  SplitSpec bad{f.dates[0], f.dates[3], f.dates[3], f.dates[4]};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("windows have shape N x T x F with one-step-ahead targets") {
  auto f = frame_with({{"close", {0, 1, 2, 3, 4, 5, 6}}, {"v", {10, 11, 12, 13, 14, 15, 16}}});
  const std::vector<std::string> features{"close", "v"};
  const auto ds = make_windows(f, NormStats{}, features, 3);
  REQUIRE(ds.size() == 4);
  CHECK(ds.inputs.size() == 4 * 3 * 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(ds.targets[i] == double(i + 3));
    CHECK(ds.target_row[i] == i + 3);
    const auto w = ds.window(i);
    CHECK(w(0, 0) == double(i));
    CHECK(w(2, 1) == double(12 + i));
  }
}

TEST_CASE("windows need more rows than the window length") {
  auto f = frame_with({{"close", {0, 1, 2}}});
  const std::vector<std::string> features{"close"};
  CHECK_THROWS_AS(make_windows(f, NormStats{}, features, 3), DataError);
  CHECK_THROWS_AS(make_windows(f, NormStats{}, features, 0), ConfigError);
}

TEST_CASE("merge concatenates and records groups") {
  auto f = frame_with({{"close", {0, 1, 2, 3}}});
  const std::vector<std::string> features{"close"};
  std::vector<WindowedDataset> parts{make_windows(f, NormStats{}, features, 2),
                                     make_windows(f, NormStats{}, features, 2)};
  const auto m = merge(parts);
  CHECK(m.size() == 4);
  CHECK(m.group == std::vector<std::size_t>{0, 0, 1, 1});
  parts[1] = make_windows(f, NormStats{}, features, 1);
  CHECK_THROWS_AS(merge(parts), ShapeError);
}

TEST_CASE("z-score of 1, 2, 3") {
  auto f = frame_with({{"a", {1, 2, 3}}});
  const std::vector<std::string> cols{"a"};
  const auto stats = fit_normalize(f, cols);
  const auto z = apply_normalize(f, stats).column("a");
  CHECK(z[0] == doctest::Approx(-1.224745).epsilon(1e-6));
  CHECK(z[1] == 0.0);
  CHECK(z[2] == doctest::Approx(1.224745).epsilon(1e-6));
  CHECK(stats.normalize(0, stats.mean[0]) == 0.0);
}

TEST_CASE("applying stats to a frame without the column is an error") {
  auto f = frame_with({{"a", {1, 2, 3}}});
  auto g = frame_with({{"b", {1, 2, 3}}});
  const std::vector<std::string> cols{"a"};
  CHECK_THROWS_AS(apply_normalize(g, fit_normalize(f, cols)), DataError);
}

TEST_CASE("window count is length minus T") {
  auto f = frame_with({{"close", {0, 1, 2, 3, 4}}});
  const std::vector<std::string> features{"close"};
  for (std::size_t T = 1; T < 5; ++T) CHECK(make_windows(f, NormStats{}, features, T).size() == 5 - T);
  const auto ds = make_windows(f, NormStats{}, features, 2);
  CHECK(ds.targets == std::vector<double>{2, 3, 4});
}

TEST_CASE("all dates before the test range give an empty-test error") {
  auto f = frame_with({{"a", {0, 1, 2}}});
  SplitSpec spec{f.dates[0], f.dates[2], Date{2030, 1, 1}, Date{2030, 12, 31}};
  CHECK_THROWS_AS(split_by_date(f, spec), DataError);
}
