#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "twofreq/config.hpp"
#include "twofreq/csv.hpp"
#include "twofreq/error.hpp"
#include "twofreq/evaluation.hpp"
#include "twofreq/gradcheck_suite.hpp"
#include "twofreq/log.hpp"
#include "twofreq/pipeline.hpp"
#include "twofreq/serialize.hpp"
#include "twofreq/synthetic.hpp"

namespace fs = std::filesystem;
using namespace twofreq;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string variant = "ensemble";
  std::string symbol;
  std::string date;
  std::string out;
  std::optional<std::string> synthetic;
};

RunConfig effective_config(const Flags& f, bool reuse_echo) {
  std::string text;
  const fs::path out = f.out.empty() ? fs::path("out") : fs::path(f.out);
  if (!f.config.empty()) {
    text = read_text(f.config);
  } else if (reuse_echo && fs::exists(out / "config.effective.json")) {
    log::info("using ", (out / "config.effective.json").string());
    text = read_text(out / "config.effective.json");
  }
  RunConfig c = load_config(text, f.synthetic.value_or(""));
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (!c.synthetic.kind.empty()) {
    c.prices = c.out / "raw" / "prices.csv";
    c.fundamentals = c.out / "raw" / "fundamentals.csv";
  }
  c.validate();
  return c;
}

void generate_synthetic(const RunConfig& c) {
  SyntheticMarket market;
  if (c.synthetic.kind == "drift") {
    DriftOptions o;
    o.symbols = c.synthetic.symbols;
    o.seed = c.synthetic.seed;
    market = make_annual_drift(o);
  } else if (c.synthetic.kind == "constant") {
    ConstantOptions o;
    o.symbols = c.synthetic.symbols;
    o.seed = c.synthetic.seed;
    market = make_constant(o);
  } else {
    market = make_ar1_market(c.synthetic.symbols, 2012, 2016, 0.9, c.synthetic.seed);
  }
  fs::create_directories(c.prices.parent_path());
  std::ofstream prices(c.prices, std::ios::binary);
  write_prices_csv(prices, market.prices);
  std::ofstream fundamentals(c.fundamentals, std::ios::binary);
  write_fundamentals_csv(fundamentals, market.fundamentals, market.ratio_names);
  log::info("synthetic ", c.synthetic.kind, " data written to ", c.prices.parent_path().string());
}

AssembledFrames load_frames(const RunConfig& c) {
  std::ifstream prices(c.prices, std::ios::binary);
  if (!prices) throw Error("cannot read " + c.prices.string());
  std::ifstream fundamentals(c.fundamentals, std::ios::binary);
  if (!fundamentals) throw Error("cannot read " + c.fundamentals.string());
  std::vector<std::string> names = c.ratio_names;
  if (names.empty()) {
    names = infer_ratio_names(fundamentals, c.fundamentals_schema);
    fundamentals.clear();
    fundamentals.seekg(0);
  }
  const auto price_rows = parse_prices(prices, c.price_schema);
  const auto fundamental_rows = parse_fundamentals(fundamentals, names, c.fundamentals_schema);
  return assemble_frames(price_rows, fundamental_rows, names);
}

fs::path prepared_dir(const RunConfig& c) { return c.out / "prepared"; }
fs::path model_path(const RunConfig& c, Variant v) { return c.out / "models" / (variant_name(v) + ".json"); }

int cmd_prepare(const Flags& f) {
  const RunConfig c = effective_config(f, false);
  write_text(c.out / "config.effective.json", config_to_json(c));
  if (!c.synthetic.kind.empty()) generate_synthetic(c);
  const PreparedData data = prepare(load_frames(c), prepare_options(c));
  write_prepared(data, prepared_dir(c));
  std::cout << summary_text(data.summary);
  return 0;
}

int cmd_train(const Flags& f) {
  const RunConfig c = effective_config(f, true);
  const Variant v = parse_variant(f.variant);
  const PreparedData data = read_prepared(prepared_dir(c));
  const VariantConfigs vc = variant_configs(c);
  ModelFile file;
  file.variant = v;
  file.config_fingerprint = config_fingerprint(c);
  switch (v) {
    case Variant::ensemble:
      file.model = train_ensemble(data.train, data.annual, vc.ensemble);
      break;
    case Variant::annual:
      file.model = AnnualModel{train_learner1(data.annual, vc.ensemble.last_training_year, vc.ensemble.learner1),
                               c.alignment};
      break;
    case Variant::daily:
      file.model = train_daily_lstm(data.train, c.window_length, vc.daily);
      break;
    case Variant::mlp:
      file.model = train_daily_mlp(data.train, c.window_length, vc.mlp);
      break;
  }
  const fs::path path = model_path(c, v);
  save_model(file, path);
  std::cout << "model written to " << path.string() << "\n";
  return 0;
}

DailyFrame history_for(const PreparedData& data, const std::string& symbol) {
  const auto train = data.train.find(symbol);
  if (train == data.train.end()) throw DataError("symbol not in prepared data: '" + symbol + "'");
  DailyFrame all = train->second;
  const DailyFrame& test = data.test.at(symbol);
  all.dates.insert(all.dates.end(), test.dates.begin(), test.dates.end());
  for (std::size_t c = 0; c < all.names.size(); ++c) {
    const auto& extra = test.column(all.names[c]);
    all.columns[c].insert(all.columns[c].end(), extra.begin(), extra.end());
  }
  return all;
}

int cmd_predict(const Flags& f) {
  if (f.symbol.empty()) throw ConfigError("predict needs --symbol");
  if (f.date.empty()) throw ConfigError("predict needs --date");
  const RunConfig c = effective_config(f, true);
  const Variant v = parse_variant(f.variant);
  const fs::path path = model_path(c, v);
  if (!fs::exists(path)) throw Error("model file " + path.string() + " not found; run train --variant " + f.variant);
  const ModelFile file = load_model(path);
  if (file.variant != v) throw Error("model file holds variant " + variant_name(file.variant));
  if (file.config_fingerprint != config_fingerprint(c))
    log::warn("model was trained with a different config (fingerprint ", file.config_fingerprint, ")");

  const Date as_of = parse_date(f.date);
  const PreparedData data = read_prepared(prepared_dir(c));
  DailyFrame history = history_for(data, f.symbol);
  std::size_t end = 0;
  while (end < history.size() && history.dates[end] <= as_of) ++end;
  if (end == 0) throw DataError("no data for '" + f.symbol + "' on or before " + as_of.to_string());
  history = history.slice(0, end);

  double price = 0.0;
  if (const auto* e = std::get_if<EnsembleModel>(&file.model)) {
    if (e->window_length != c.window_length) throw ConfigError("model window_length differs from config");
    price = predict_next_close(*e, f.symbol, history);
  } else if (const auto* d = std::get_if<DailyModel>(&file.model)) {
    if (d->window_length != c.window_length) throw ConfigError("model window_length differs from config");
    price = predict_next_close(*d, f.symbol, history);
  } else {
    const auto& a = std::get<AnnualModel>(file.model);
    price = predict_annual_close(a.learner, f.symbol, history.dates.back(), a.alignment);
  }
  std::cout << f.symbol << ' ' << history.dates.back().to_string() << ' ' << csv::format_number(price) << "\n";
  return 0;
}

int cmd_evaluate(const Flags& f) {
  const RunConfig c = effective_config(f, true);
  const PreparedData data = read_prepared(prepared_dir(c));
  const EvaluationResult result = evaluate_variants(data, variant_configs(c), c.seed, config_fingerprint(c));
  write_text(c.out / "report.json", report_json(result.report));
  write_text(c.out / "report.txt", report_table(result.report));

  std::ofstream preds(c.out / "predictions.csv", std::ios::binary);
  preds << "symbol,date,target,naive";
  for (Variant v : kReportOrder) preds << ',' << variant_name(v);
  preds << '\n';
  for (const auto& p : result.predictions)
    for (std::size_t i = 0; i < p.dates.size(); ++i) {
      preds << p.symbol << ',' << p.dates[i].to_string() << ',' << csv::format_number(p.targets[i]) << ','
            << csv::format_number(p.naive[i]);
      for (const auto& v : p.variants) preds << ',' << (v ? csv::format_number((*v)[i]) : std::string());
      preds << '\n';
    }

  if (result.ensemble) {
    fs::create_directories(c.out / "forecast");
    for (const auto& [symbol, test] : data.test) {
      if (!f.symbol.empty() && symbol != f.symbol) continue;
      emit_plot_data(forecast_series(*result.ensemble, test), c.out / "forecast" / symbol);
    }
  }
  std::cout << report_table(result.report);
  bool any_failed = false;
  for (const auto& row : result.report.variants) any_failed |= !row.ok;
  return any_failed ? 1 : 0;
}

int cmd_gradcheck(const Flags& f) {
  const GradCheckSummary s = run_gradcheck_suite(10, f.seed.value_or(1));
  for (const auto& r : s.instances) {
    std::printf("%-4s F=%zu H=%zu", r.network.c_str(), r.inputs, r.hidden);
    if (r.network == "lstm") std::printf(" T=%zu", r.steps);
    std::printf("  params %.3e", r.param_error);
    if (r.network == "lstm") std::printf("  inputs %.3e", r.input_error);
    std::printf("\n");
  }
  const bool ok = s.max_error < 1e-4;
  std::printf("max relative error %.3e: %s\n", s.max_error, ok ? "pass" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-frequency serial LSTM ensemble for next-day close prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run config");
  app.add_option("--seed", f.seed, "Training seed (overrides the config)");
  app.add_option("--out", f.out, "Output directory (overrides the config)");
  app.add_option("--synthetic", f.synthetic, "Use a built-in dataset: drift, constant or ar1")
      ->expected(0, 1)
      ->default_str("drift");
  app.add_option("--variant", f.variant, "ensemble, daily, annual or mlp");
  app.add_option("--symbol", f.symbol, "Ticker");
  app.add_option("--date", f.date, "As-of date, YYYY-MM-DD");

  auto* prepare_cmd = app.add_subcommand("prepare", "Ingest, impute, add indicators and split");
  auto* train_cmd = app.add_subcommand("train", "Train one variant and write its model file");
  auto* predict_cmd = app.add_subcommand("predict", "Print the next-day close predicted by a saved model");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Train and compare all four variants on the test split");
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Check LSTM and MLP gradients by finite differences");

  CLI11_PARSE(app, argc, argv);
  if (f.synthetic && f.synthetic->empty()) f.synthetic = "drift";

  try {
    if (*prepare_cmd) return cmd_prepare(f);
    if (*train_cmd) return cmd_train(f);
    if (*predict_cmd) return cmd_predict(f);
    if (*evaluate_cmd) return cmd_evaluate(f);
    if (*gradcheck_cmd) return cmd_gradcheck(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
