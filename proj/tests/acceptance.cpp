// Acceptance checks: one PASS/FAIL line per criterion. The optional first
// argument is the path of the twofreq CLI binary, used by the pipeline check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "oracles.hpp"
#include "twofreq/config.hpp"
#include "twofreq/evaluation.hpp"
#include "twofreq/gradcheck_suite.hpp"
#include "twofreq/indicators.hpp"
#include "twofreq/log.hpp"
#include "twofreq/lstm.hpp"
#include "twofreq/pipeline.hpp"
#include "twofreq/rng.hpp"
#include "twofreq/serialize.hpp"
#include "twofreq/synthetic.hpp"
#include "twofreq/variants.hpp"

using namespace twofreq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool informational = false;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Outcome gradients() {
  const auto summary = run_gradcheck_suite(10, 2024);
  return {summary.max_error < 1e-4, fmt("10 LSTM and 10 MLP instances, max relative error %.2e", summary.max_error)};
}

Outcome indicators() {
  Rng rng(77);
  double worst = 0.0;
  bool bounded = true;
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = 60 + rng.below(200);
    std::vector<double> x{50.0 + rng.uniform(0, 100)};
    for (std::size_t i = 1; i < n; ++i) x.push_back(std::max(1.0, x.back() + rng.normal()));
    const auto expected_macd = oracle::macd(x);
    const auto expected_rsi = oracle::rsi(x);
    const auto macd = macd_series(x);
    const auto rsi = rsi_series(x);
    for (std::size_t t = 0; t < n; ++t) {
      worst = std::max({worst, std::abs(macd[t].macd - expected_macd.macd[t]),
                        std::abs(macd[t].signal - expected_macd.signal[t])});
      if (t >= 14) {
        worst = std::max(worst, std::abs(rsi[t] - expected_rsi[t]));
        bounded = bounded && rsi[t] >= 0.0 && rsi[t] <= 100.0;
      }
    }
  }
  return {worst < 1e-10 && bounded,
          fmt("1000 random walks, max abs difference %.2e, RSI in [0, 100]: ", worst) + (bounded ? "yes" : "no")};
}

Outcome normalization() {
  const auto data = [] {
    DriftOptions o;
    o.ratios = 4;
    o.symbols = 6;
    const auto m = make_annual_drift(o);
    PrepareOptions p;
    p.split = drift_split(o);
    return prepare(assemble_frames(m.prices, m.fundamentals, m.ratio_names), p);
  }();
  double worst_mean = 0, worst_var = 0, worst_round = 0;
  for (const auto& [symbol, train] : data.train) {
    const auto stats = fit_normalize(train, daily_features());
    const auto z = apply_normalize(train, stats);
    for (const auto& name : daily_features()) {
      if (stats.constant(stats.index_of(name))) continue;
      const auto& col = z.column(name);
      worst_mean = std::max(worst_mean, std::abs(oracle::mean(col)));
      worst_var = std::max(worst_var, std::abs(oracle::population_variance(col) - 1.0));
      const auto back = denormalize(col, stats, name);
      const auto& raw = train.column(name);
      for (std::size_t i = 0; i < raw.size(); ++i)
        worst_round = std::max(worst_round, std::abs(back[i] - raw[i]) / std::max(1.0, std::abs(raw[i])));
    }
  }
  return {worst_mean < 1e-9 && worst_var < 1e-9 && worst_round < 1e-12,
          fmt("max |mean| %.1e, max |var-1| %.1e, max round-trip error %.1e", worst_mean, worst_var, worst_round)};
}

PreparedData drift_prepared(const RunConfig& c) {
  DriftOptions o;
  o.symbols = c.synthetic.symbols;
  o.seed = c.synthetic.seed;
  const auto m = make_annual_drift(o);
  return prepare(assemble_frames(m.prices, m.fundamentals, m.ratio_names), prepare_options(c));
}

Outcome synthetic_ordering() {
  RunConfig c = load_config("", "drift");
  const PreparedData data = drift_prepared(c);
  int ensemble_wins = 0;
  bool daily_beats_annual = true;
  std::ostringstream rows;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    const auto report = evaluate_variants(data, variant_configs(c), seed).report;
    auto score = [&](Variant v) {
      for (const auto& r : report.variants)
        if (r.variant == v && r.ok) return r.rmse.normalized_pooled;
      return std::numeric_limits<double>::infinity();
    };
    const double daily = score(Variant::daily), annual = score(Variant::annual), ensemble = score(Variant::ensemble);
    if (ensemble < daily) ++ensemble_wins;
    if (!(daily < annual)) daily_beats_annual = false;
    rows << fmt(" [seed %.0f: ens %.4f daily %.4f", double(seed), ensemble, daily) << fmt(" annual %.4f]", annual);
  }
  return {ensemble_wins >= 4 && daily_beats_annual,
          "ensemble < daily in " + std::to_string(ensemble_wins) + "/5 seeds, daily < annual in every seed: " +
              (daily_beats_annual ? "yes" : "no") + ";" + rows.str()};
}

Outcome ar1_learning() {
  const std::size_t T = 8;
  int wins = 0;
  std::ostringstream rows;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto train = ar1_windows(make_ar1(Ar1Options{50, 20, 0.9, 0.0, seed}), T);
    const auto test = ar1_windows(make_ar1(Ar1Options{50, 20, 0.9, 0.0, seed + 100}), T);
    LstmTrainConfig c;
    c.hidden = 8;
    c.epochs = 200;
    c.seed = seed;
    const auto params = lstm_train(train, c).params;
    const auto pred = lstm_predict(params, test);
    std::vector<double> last;
    for (std::size_t i = 0; i < test.size(); ++i) last.push_back(test.window(i)(T - 1, 0));
    const double model = rmse(pred, test.targets), naive = rmse(last, test.targets);
    if (model < naive) ++wins;
    rows << fmt(" [seed %.0f: lstm %.4f last-value %.4f]", double(seed), model, naive);
  }
  return {wins == 5, "lstm beats last value in " + std::to_string(wins) + "/5 seeds;" + rows.str()};
}

Outcome determinism() {
  RunConfig c = load_config("", "drift");
  c.synthetic.symbols = 6;
  c.learner1.epochs = 20;
  c.learner2.epochs = 3;
  c.daily.epochs = 3;
  c.mlp.epochs = 3;
  const PreparedData data = drift_prepared(c);
  const auto vc = variant_configs(c);

  const auto a = evaluate_variants(data, vc, c.seed, config_fingerprint(c));
  const auto b = evaluate_variants(data, vc, c.seed, config_fingerprint(c));
  const bool same_models = a.ensemble && b.ensemble && *a.ensemble == *b.ensemble;
  const bool same_reports = report_json(a.report) == report_json(b.report);

  const fs::path dir = fs::temp_directory_path() / "twofreq_acceptance_models";
  fs::create_directories(dir);
  bool exact = a.ensemble.has_value();
  if (exact) {
    save_model(ModelFile{Variant::ensemble, config_fingerprint(c), *a.ensemble}, dir / "ensemble.json");
    const auto loaded = std::get<EnsembleModel>(load_model(dir / "ensemble.json").model);
    for (const auto& [symbol, test] : data.test) {
      const auto x = forecast_series(*a.ensemble, test), y = forecast_series(loaded, test);
      exact = exact && x.predicted == y.predicted;
    }
  }
  const DailyModel daily = train_daily_lstm(data.train, c.window_length, vc.daily);
  save_model(ModelFile{Variant::daily, "", daily}, dir / "daily.json");
  const auto daily_back = std::get<DailyModel>(load_model(dir / "daily.json").model);
  for (const auto& [symbol, test] : data.test)
    exact = exact && predict_next_close(daily, symbol, test) == predict_next_close(daily_back, symbol, test);
  fs::remove_all(dir);

  return {same_models && same_reports && exact,
          std::string("identical models: ") + (same_models ? "yes" : "no") +
              ", identical reports: " + (same_reports ? "yes" : "no") +
              ", save/load predictions bit-exact: " + (exact ? "yes" : "no")};
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome pipeline(const std::string& cli) {
  if (cli.empty()) return {false, "CLI path not given"};
  const fs::path out = fs::temp_directory_path() / "twofreq_acceptance_pipeline";
  fs::remove_all(out);
  const std::string base = "\"" + cli + "\" --synthetic drift --out \"" + out.string() + "\" ";
  const int prepare_rc = run(base + "prepare");
  const int train_rc = run(base + "train --variant ensemble");
  const int eval_rc = run(base + "evaluate");

  std::ifstream table(out / "report.txt");
  std::stringstream text;
  text << table.rdbuf();
  int rows = 0;
  for (Variant v : kReportOrder)
    if (text.str().find(variant_label(v)) != std::string::npos) ++rows;
  bool plots = false;
  if (fs::exists(out / "forecast"))
    for (const auto& entry : fs::directory_iterator(out / "forecast"))
      if (entry.path().extension() == ".csv" && fs::exists(fs::path(entry.path()).replace_extension(".svg")))
        plots = true;
  const bool ok = prepare_rc == 0 && train_rc == 0 && eval_rc == 0 && rows == 4 && plots &&
                  fs::exists(out / "models" / "ensemble.json");
  std::ostringstream detail;
  detail << "exit codes prepare " << prepare_rc << ", train " << train_rc << ", evaluate " << eval_rc
         << "; report rows " << rows << "/4; forecast csv+svg: " << (plots ? "yes" : "no");
  if (ok) fs::remove_all(out);
  return {ok, detail.str()};
}

Outcome real_data() {
  const char* dir = std::getenv("TWOFREQ_DATA_DIR");
  const fs::path data = dir ? fs::path(dir) : fs::path("data");
  if (!fs::exists(data / "prices.csv") || !fs::exists(data / "fundamentals.csv"))
    return {true, "no dataset at " + data.string() + "; skipped", true};
  RunConfig c;
  c.prices = data / "prices.csv";
  c.fundamentals = data / "fundamentals.csv";
  std::ifstream prices(c.prices), fundamentals(c.fundamentals);
  const auto names = infer_ratio_names(fundamentals);
  fundamentals.clear();
  fundamentals.seekg(0);
  const auto frames =
      assemble_frames(parse_prices(prices), parse_fundamentals(fundamentals, names), names);
  const auto prepared = prepare(frames, prepare_options(c));
  std::string text = summary_text(prepared.summary);
  for (auto& ch : text)
    if (ch == '\n') ch = ' ';
  return {true, text, true};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string only = argc > 2 ? argv[2] : "";
  log::set_level(log::Level::quiet);

  struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"gradients", 10, gradients},
      {"indicators", 30, indicators},
      {"normalization", 60, normalization},
      {"synthetic-ordering", 300, synthetic_ordering},
      {"ar1-learning", 120, ar1_learning},
      {"determinism-persistence", 300, determinism},
      {"pipeline-integration", 300, [&] { return pipeline(cli); }},
      {"real-data", 600, real_data},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.name) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const char* status = o.informational ? "INFO" : (o.pass && in_time ? "PASS" : "FAIL");
    if (!o.informational && !(o.pass && in_time)) ++failures;
    std::printf("%s %s: %s (%.1fs, budget %.0fs)\n", status, c.name.c_str(), o.detail.c_str(), seconds,
                c.budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
