#include "twofreq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "twofreq/csv.hpp"
#include "twofreq/error.hpp"
#include "twofreq/log.hpp"

namespace twofreq {
namespace {

using nlohmann::json;

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct SymbolTest {
  const DailyFrame* train;
  const DailyFrame* test;
  NormStats close;
  std::vector<double> targets;
};

RmseSummary summarize(const std::vector<SymbolTest>& symbols, const std::vector<std::vector<double>>& preds) {
  RmseSummary s;
  std::vector<double> all_pred, all_target, all_pred_cur, all_target_cur;
  double norm_sum = 0.0, cur_sum = 0.0;
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    const auto& targets = symbols[k].targets;
    const auto& p = preds[k];
    const auto pc = denormalize(p, symbols[k].close, "close");
    const auto tc = denormalize(targets, symbols[k].close, "close");
    norm_sum += rmse(p, targets);
    cur_sum += rmse(pc, tc);
    all_pred.insert(all_pred.end(), p.begin(), p.end());
    all_target.insert(all_target.end(), targets.begin(), targets.end());
    all_pred_cur.insert(all_pred_cur.end(), pc.begin(), pc.end());
    all_target_cur.insert(all_target_cur.end(), tc.begin(), tc.end());
  }
  s.points = all_pred.size();
  s.normalized_pooled = rmse(all_pred, all_target);
  s.currency_pooled = rmse(all_pred_cur, all_target_cur);
  s.normalized_symbol_mean = norm_sum / static_cast<double>(symbols.size());
  s.currency_symbol_mean = cur_sum / static_cast<double>(symbols.size());
  return s;
}

void require_same_targets(const WindowedDataset& windows, const std::vector<double>& targets, Variant v) {
  if (windows.targets != targets)
    throw Error("internal: " + variant_name(v) + " test targets differ from the shared targets");
}

json summary_json(const RmseSummary& s) {
  return {{"normalized_pooled", s.normalized_pooled},
          {"normalized_symbol_mean", s.normalized_symbol_mean},
          {"currency_pooled", s.currency_pooled},
          {"currency_symbol_mean", s.currency_symbol_mean},
          {"points", s.points}};
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size())
    throw ShapeError("rmse: " + std::to_string(pred.size()) + " predictions vs " + std::to_string(actual.size()) +
                     " actual values");
  if (pred.empty()) throw ShapeError("rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) ss += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  return std::sqrt(ss / static_cast<double>(pred.size()));
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::daily: return "daily";
    case Variant::annual: return "annual";
    case Variant::ensemble: return "ensemble";
    case Variant::mlp: return "mlp";
  }
  return "?";
}

std::string variant_label(Variant v) {
  switch (v) {
    case Variant::daily: return "LSTM daily";
    case Variant::annual: return "LSTM annual";
    case Variant::ensemble: return "Ensemble LSTM";
    case Variant::mlp: return "NN (MLP)";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : kReportOrder)
    if (variant_name(v) == name) return v;
  throw ConfigError("unknown variant '" + name + "' (expected ensemble, daily, annual or mlp)");
}

double reference_rmse(Variant v) {
  switch (v) {
    case Variant::daily: return 0.0124;
    case Variant::annual: return 0.08;
    case Variant::ensemble: return 0.0119;
    case Variant::mlp: return 0.07;
  }
  return 0.0;
}

std::vector<double> test_targets(const DailyFrame& train_raw, const DailyFrame& test_raw, std::size_t window_length) {
  const std::vector<std::string> close{"close"};
  const NormStats stats = fit_normalize(train_raw, close);
  const auto& c = test_raw.column("close");
  if (c.size() < window_length + 1) throw DataError("'" + test_raw.symbol + "': test frame shorter than one window");
  std::vector<double> out;
  for (std::size_t i = window_length; i < c.size(); ++i) out.push_back(stats.normalize(0, c[i]));
  return out;
}

EvaluationResult evaluate_variants(const PreparedData& data, const VariantConfigs& configs, std::uint64_t seed,
                                   const std::string& config_fingerprint) {
  const std::size_t T = configs.ensemble.window_length;
  if (data.train.empty()) throw DataError("evaluate: no prepared symbols");

  std::vector<SymbolTest> symbols;
  const std::vector<std::string> close{"close"};
  for (const auto& [symbol, train] : data.train) {
    const DailyFrame& test = data.test.at(symbol);
    symbols.push_back({&train, &test, fit_normalize(train, close), test_targets(train, test, T)});
  }

  EvaluationResult result;
  EvalReport& report = result.report;
  report.seed = seed;
  report.config_fingerprint = config_fingerprint;
  report.symbols = symbols.size();
  report.notes = {
      "reference values are the published figures, shown for orientation only; they are not pass/fail targets",
      "the NN baseline is a one-hidden-layer MLP trained by first-order gradient descent, not Levenberg-Marquardt",
      "the published NN figure appears as 0.067 in the text and 0.07 in the table",
      "the annual variant is the annual-ratio learner on its own: its year-end close forecast is used as the "
      "next-day forecast for every day of the aligned year",
  };
  if (configs.ensemble.alignment.mode == AlignmentMode::same_year)
    report.notes.push_back(
        "alignment same_year: year-Y annual predictions are visible on every day of year Y (look-ahead within the "
        "year); use alignment lagged to remove it");

  std::vector<std::vector<double>> naive;
  for (const auto& s : symbols) {
    std::vector<double> p;
    const auto& c = s.test->column("close");
    for (std::size_t i = T; i < c.size(); ++i) p.push_back(s.close.normalize(0, c[i - 1]));
    naive.push_back(std::move(p));
  }
  report.naive = summarize(symbols, naive);

  std::vector<std::optional<std::vector<std::vector<double>>>> preds(std::size(kReportOrder));
  std::optional<AnnualLearner> learner1;

  const auto run = [&](Variant v, const auto& body) {
    const auto slot = static_cast<std::size_t>(std::find(std::begin(kReportOrder), std::end(kReportOrder), v) -
                                               std::begin(kReportOrder));
    VariantResult row;
    row.variant = v;
    try {
      log::info("evaluate: training ", variant_name(v));
      std::vector<std::vector<double>> p = body();
      row.rmse = summarize(symbols, p);
      row.ok = true;
      preds[slot] = std::move(p);
    } catch (const std::exception& e) {
      log::warn("evaluate: variant ", variant_name(v), " failed: ", e.what());
      row.error = e.what();
    }
    return row;
  };

  VariantResult daily_row = run(Variant::daily, [&] {
    const DailyModel model = train_daily_lstm(data.train, T, configs.daily);
    std::vector<std::vector<double>> out;
    for (const auto& s : symbols) {
      const WindowedDataset w = daily_windows(model, *s.test);
      require_same_targets(w, s.targets, Variant::daily);
      out.push_back(predict_normalized(model, w));
    }
    return out;
  });

  VariantResult annual_row = run(Variant::annual, [&] {
    learner1 = train_learner1(data.annual, configs.ensemble.last_training_year, configs.ensemble.learner1);
    std::vector<std::vector<double>> out;
    for (const auto& s : symbols) {
      std::vector<double> p;
      for (std::size_t i = T; i < s.test->size(); ++i)
        p.push_back(s.close.normalize(
            0, predict_annual_close(*learner1, s.test->symbol, s.test->dates[i - 1], configs.ensemble.alignment)));
      out.push_back(std::move(p));
    }
    return out;
  });

  VariantResult ensemble_row = run(Variant::ensemble, [&] {
    if (!learner1) throw StageError(1, annual_row.error);
    EnsembleModel model = train_learner2(data.train, *learner1, configs.ensemble);
    std::vector<std::vector<double>> out;
    for (const auto& s : symbols) {
      const WindowedDataset w = ensemble_windows(model, *s.test);
      require_same_targets(w, s.targets, Variant::ensemble);
      out.push_back(lstm_predict(model.learner2, w));
    }
    result.ensemble = std::move(model);
    return out;
  });

  VariantResult mlp_row = run(Variant::mlp, [&] {
    const DailyModel model = train_daily_mlp(data.train, T, configs.mlp);
    std::vector<std::vector<double>> out;
    for (const auto& s : symbols) {
      const WindowedDataset w = daily_windows(model, *s.test);
      require_same_targets(w, s.targets, Variant::mlp);
      out.push_back(predict_normalized(model, w));
    }
    return out;
  });

  report.variants = {daily_row, annual_row, ensemble_row, mlp_row};

  for (std::size_t k = 0; k < symbols.size(); ++k) {
    TestPredictions tp;
    tp.symbol = symbols[k].test->symbol;
    tp.dates.assign(symbols[k].test->dates.begin() + static_cast<long>(T), symbols[k].test->dates.end());
    tp.targets = symbols[k].targets;
    tp.naive = naive[k];
    for (const auto& p : preds) tp.variants.push_back(p ? std::optional((*p)[k]) : std::nullopt);
    result.predictions.push_back(std::move(tp));
  }
  return result;
}

std::string report_json(const EvalReport& report) {
  json j;
  j["format"] = "twofreq-report";
  j["version"] = 1;
  j["seed"] = report.seed;
  j["config_fingerprint"] = report.config_fingerprint;
  j["symbols"] = report.symbols;
  j["metric"] = "RMSE of next-day close on the test split";
  j["variants"] = json::array();
  for (const auto& row : report.variants) {
    json r{{"variant", variant_name(row.variant)},
           {"label", variant_label(row.variant)},
           {"reference_rmse", reference_rmse(row.variant)},
           {"ok", row.ok}};
    if (row.ok) r["rmse"] = summary_json(row.rmse);
    else r["error"] = row.error;
    j["variants"].push_back(r);
  }
  j["naive_last_value"] = summary_json(report.naive);
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
  std::ostringstream os;
  os << "Next-day close RMSE on the test split (" << report.symbols << " symbols, seed " << report.seed << ")\n\n";
  const int w0 = 30, w = 16;
  const auto cellw = [&](const std::string& s, int width) {
    std::string out = s;
    if (static_cast<int>(out.size()) < width) out.append(static_cast<std::size_t>(width) - out.size(), ' ');
    return out;
  };
  os << cellw("", w0);
  for (const auto& row : report.variants) os << cellw(variant_label(row.variant), w);
  os << "\n";
  const auto line = [&](const std::string& name, auto value) {
    os << cellw(name, w0);
    for (const auto& row : report.variants) os << cellw(row.ok ? value(row) : std::string("failed"), w);
    os << "\n";
  };
  line("normalized, pooled", [](const VariantResult& r) { return fixed(r.rmse.normalized_pooled, 4); });
  line("normalized, symbol mean", [](const VariantResult& r) { return fixed(r.rmse.normalized_symbol_mean, 4); });
  line("currency, pooled", [](const VariantResult& r) { return fixed(r.rmse.currency_pooled, 4); });
  line("currency, symbol mean", [](const VariantResult& r) { return fixed(r.rmse.currency_symbol_mean, 4); });
  os << cellw("reference (published)", w0);
  for (const auto& row : report.variants) {
    const double ref = reference_rmse(row.variant);
    os << cellw(row.variant == Variant::mlp ? "0.07 (0.067)" : fixed(ref, ref < 0.05 ? 4 : 2), w);
  }
  os << "\n\n";
  os << "naive last-value baseline: normalized pooled " << fixed(report.naive.normalized_pooled, 4)
     << ", symbol mean " << fixed(report.naive.normalized_symbol_mean, 4) << ", currency pooled "
     << fixed(report.naive.currency_pooled, 4) << " (" << report.naive.points << " points)\n";
  for (const auto& row : report.variants)
    if (!row.ok) os << variant_name(row.variant) << " failed: " << row.error << "\n";
  os << "\nnotes:\n";
  for (const auto& n : report.notes) os << "  - " << n << "\n";
  if (!report.config_fingerprint.empty()) os << "config fingerprint: " << report.config_fingerprint << "\n";
  return os.str();
}

ForecastSeries forecast_series(const EnsembleModel& model, const DailyFrame& test_raw) {
  const WindowedDataset windows = ensemble_windows(model, test_raw);
  const NormStats& stats = model.daily_stats.at(test_raw.symbol);
  const std::size_t close = stats.index_of("close");
  const auto& actual = test_raw.column("close");
  ForecastSeries s;
  s.symbol = test_raw.symbol;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const std::size_t row = windows.target_row[i];
    s.dates.push_back(test_raw.dates[row]);
    s.actual.push_back(actual[row]);
    s.predicted.push_back(stats.denormalize(close, lstm_predict(model.learner2, windows.window(i))));
  }
  return s;
}

void write_forecast_csv(const ForecastSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "date,actual,predicted\n";
  for (std::size_t i = 0; i < series.dates.size(); ++i)
    out << series.dates[i].to_string() << ',' << csv::format_number(series.actual[i]) << ','
        << csv::format_number(series.predicted[i]) << '\n';
}

ForecastSeries read_forecast_csv(const std::filesystem::path& path, const std::string& symbol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  ForecastSeries s;
  s.symbol = symbol;
  std::string line;
  std::size_t n = 0;
  if (!csv::next_line(in, line, n) || line != "date,actual,predicted") throw SchemaError("date,actual,predicted");
  while (csv::next_line(in, line, n)) {
    const auto f = csv::split_record(line);
    if (f.size() != 3) throw RowError(n, "expected 3 fields");
    s.dates.push_back(parse_date(f[0]));
    s.actual.push_back(csv::parse_number(f[1]).value_or(kMissing));
    s.predicted.push_back(csv::parse_number(f[2]).value_or(kMissing));
  }
  return s;
}

void write_forecast_svg(const ForecastSeries& series, const std::filesystem::path& path) {
  const double width = 960, height = 420, left = 70, right = 20, top = 40, bottom = 50;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : {&series.actual, &series.predicted})
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (!(hi > lo)) {
    lo = std::isfinite(lo) ? lo - 1.0 : 0.0;
    hi = lo + 2.0;
  }
  const std::size_t n = series.dates.size();
  const auto px = [&](std::size_t i) { return left + (n > 1 ? (width - left - right) * i / double(n - 1) : 0.0); };
  const auto py = [&](double v) { return top + (height - top - bottom) * (hi - v) / (hi - lo); };
  const auto polyline = [&](const std::vector<double>& v, const char* color) {
    std::string pts;
    for (std::size_t i = 0; i < v.size(); ++i) pts += (i ? " " : "") + fixed(px(i), 2) + "," + fixed(py(v[i]), 2);
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">Forecast vs actual close: " << series.symbol
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"5\" y=\"" << top + 4 << "\">" << fixed(hi, 2) << "</text>\n";
  out << "<text x=\"5\" y=\"" << height - bottom << "\">" << fixed(lo, 2) << "</text>\n";
  if (n > 0) {
    out << "<text x=\"" << left << "\" y=\"" << height - bottom + 20 << "\">" << series.dates.front().to_string()
        << "</text>\n";
    out << "<text x=\"" << width - right - 80 << "\" y=\"" << height - bottom + 20 << "\">"
        << series.dates.back().to_string() << "</text>\n";
  }
  out << polyline(series.actual, "#1f77b4");
  out << polyline(series.predicted, "#d62728");
  out << "<text x=\"" << width - 220 << "\" y=\"22\" fill=\"#1f77b4\">actual</text>\n";
  out << "<text x=\"" << width - 150 << "\" y=\"22\" fill=\"#d62728\">predicted</text>\n";
  out << "</svg>\n";
}

void emit_plot_data(const ForecastSeries& series, const std::filesystem::path& stem) {
  auto csv_path = stem;
  csv_path += ".csv";
  auto svg_path = stem;
  svg_path += ".svg";
  write_forecast_csv(series, csv_path);
  write_forecast_svg(series, svg_path);
}

}  // namespace twofreq
