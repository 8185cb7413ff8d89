#include "twofreq/config.hpp"

#include <cstdio>

#include "json.hpp"
#include "twofreq/error.hpp"
#include "twofreq/synthetic.hpp"

namespace twofreq {
namespace {

using nlohmann::json;

json learner_json(const LearnerConfig& l) {
  return {{"hidden", l.hidden},
          {"epochs", l.epochs},
          {"batch_size", l.batch_size},
          {"learning_rate", l.learning_rate},
          {"patience", l.patience ? json(*l.patience) : json(nullptr)}};
}

const char* name_of(DateFormat f) { return f == DateFormat::iso ? "iso" : "dmy"; }

json to_json(const RunConfig& c) {
  json j;
  j["data"] = {{"prices", c.prices.string()},
               {"fundamentals", c.fundamentals.string()},
               {"ratio_names", c.ratio_names},
               {"price_columns",
                {{"date", c.price_schema.date},
                 {"symbol", c.price_schema.symbol},
                 {"open", c.price_schema.open},
                 {"high", c.price_schema.high},
                 {"low", c.price_schema.low},
                 {"close", c.price_schema.close},
                 {"volume", c.price_schema.volume},
                 {"date_format", name_of(c.price_schema.date_format)}}},
               {"fundamentals_columns",
                {{"symbol", c.fundamentals_schema.symbol},
                 {"period_end", c.fundamentals_schema.period_end},
                 {"date_format", name_of(c.fundamentals_schema.date_format)}}}};
  j["split"] = {{"train_start", c.split.train_start.to_string()},
                {"train_end", c.split.train_end.to_string()},
                {"test_start", c.split.test_start.to_string()},
                {"test_end", c.split.test_end.to_string()}};
  j["window_length"] = c.window_length;
  j["indicators"] = {{"ema_seed", c.indicators.macd.seed == EmaSeed::first ? "first" : "sma"},
                     {"macd_fast", c.indicators.macd.fast},
                     {"macd_slow", c.indicators.macd.slow},
                     {"signal_period", c.indicators.macd.signal},
                     {"rsi_period", c.indicators.rsi_period},
                     {"warmup", c.indicators.warmup == WarmupPolicy::backfill ? "backfill" : "drop"}};
  j["impute"] = c.impute == ImputeStrategy::mean ? "mean" : "regression";
  j["annual_first_year"] = c.annual_first_year;
  j["learner1"] = learner_json(c.learner1);
  j["learner2"] = learner_json(c.learner2);
  j["daily"] = learner_json(c.daily);
  j["mlp"] = learner_json(c.mlp);
  j["optimizer"] = {{"kind", c.optimizer.kind == OptimizerKind::adam ? "adam" : "sgd"},
                    {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2},
                    {"epsilon", c.optimizer.epsilon},
                    {"clip_norm", c.optimizer.clip_norm ? json(*c.optimizer.clip_norm) : json(nullptr)},
                    {"weight_decay", c.optimizer.weight_decay}};
  j["seed"] = c.seed;
  j["alignment"] = {{"mode", c.alignment.mode == AlignmentMode::same_year ? "same_year" : "lagged"},
                    {"extend_first_year", c.alignment.extend_first_year}};
  j["out"] = c.out.string();
  j["synthetic"] = {{"kind", c.synthetic.kind}, {"symbols", c.synthetic.symbols}, {"seed", c.synthetic.seed}};
  return j;
}

void overlay(json& base, const json& over, const std::string& path) {
  if (!over.is_object())
    throw ConfigError(path.empty() ? "config must be a JSON object" : "config field '" + path + "' must be an object");
  for (const auto& [key, value] : over.items()) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config field '" + field + "'");
    if (base[key].is_object()) overlay(base[key], value, field);
    else base[key] = value;
  }
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  template <typename T>
  T get(const std::string& field) const {
    try {
      return at(field).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config field '" + field + "' has the wrong type");
    }
  }

  template <typename T>
  std::optional<T> optional(const std::string& field) const {
    if (at(field).is_null()) return std::nullopt;
    return get<T>(field);
  }

  Date date(const std::string& field) const {
    try {
      return parse_date(get<std::string>(field));
    } catch (const DateParseError&) {
      throw ConfigError("config field '" + field + "' is not an ISO date");
    }
  }

  template <typename E>
  E choice(const std::string& field, std::initializer_list<std::pair<const char*, E>> options) const {
    const auto value = get<std::string>(field);
    std::string allowed;
    for (const auto& [name, e] : options) {
      if (value == name) return e;
      allowed += allowed.empty() ? name : std::string(" or ") + name;
    }
    throw ConfigError("config field '" + field + "' must be " + allowed + ", got '" + value + "'");
  }

  LearnerConfig learner(const std::string& name) const {
    LearnerConfig l;
    l.hidden = get<std::size_t>(name + ".hidden");
    l.epochs = get<int>(name + ".epochs");
    l.batch_size = get<std::size_t>(name + ".batch_size");
    l.learning_rate = get<double>(name + ".learning_rate");
    l.patience = optional<int>(name + ".patience");
    return l;
  }

 private:
  const json& at(const std::string& field) const {
    const json* node = &root_;
    std::size_t start = 0;
    while (true) {
      const auto dot = field.find('.', start);
      node = &node->at(field.substr(start, dot - start));
      if (dot == std::string::npos) return *node;
      start = dot + 1;
    }
  }

  const json& root_;
};

RunConfig from_json(const json& j) {
  const Reader r(j);
  RunConfig c;
  c.prices = r.get<std::string>("data.prices");
  c.fundamentals = r.get<std::string>("data.fundamentals");
  c.ratio_names = r.get<std::vector<std::string>>("data.ratio_names");
  const std::initializer_list<std::pair<const char*, DateFormat>> formats{{"iso", DateFormat::iso},
                                                                         {"dmy", DateFormat::dmy}};
  auto& ps = c.price_schema;
  ps.date = r.get<std::string>("data.price_columns.date");
  ps.symbol = r.get<std::string>("data.price_columns.symbol");
  ps.open = r.get<std::string>("data.price_columns.open");
  ps.high = r.get<std::string>("data.price_columns.high");
  ps.low = r.get<std::string>("data.price_columns.low");
  ps.close = r.get<std::string>("data.price_columns.close");
  ps.volume = r.get<std::string>("data.price_columns.volume");
  ps.date_format = r.choice("data.price_columns.date_format", formats);
  c.fundamentals_schema.symbol = r.get<std::string>("data.fundamentals_columns.symbol");
  c.fundamentals_schema.period_end = r.get<std::string>("data.fundamentals_columns.period_end");
  c.fundamentals_schema.date_format = r.choice("data.fundamentals_columns.date_format", formats);

  c.split = {r.date("split.train_start"), r.date("split.train_end"), r.date("split.test_start"),
             r.date("split.test_end")};
  c.window_length = r.get<std::size_t>("window_length");
  c.indicators.macd.seed = r.choice("indicators.ema_seed", {std::pair{"first", EmaSeed::first}, {"sma", EmaSeed::sma}});
  c.indicators.macd.fast = r.get<int>("indicators.macd_fast");
  c.indicators.macd.slow = r.get<int>("indicators.macd_slow");
  c.indicators.macd.signal = r.get<int>("indicators.signal_period");
  c.indicators.rsi_period = r.get<int>("indicators.rsi_period");
  c.indicators.warmup =
      r.choice("indicators.warmup", {std::pair{"backfill", WarmupPolicy::backfill}, {"drop", WarmupPolicy::drop}});
  c.impute = r.choice("impute", {std::pair{"mean", ImputeStrategy::mean}, {"regression", ImputeStrategy::regression}});
  c.annual_first_year = r.get<int>("annual_first_year");
  c.learner1 = r.learner("learner1");
  c.learner2 = r.learner("learner2");
  c.daily = r.learner("daily");
  c.mlp = r.learner("mlp");
  c.optimizer.kind = r.choice("optimizer.kind", {std::pair{"adam", OptimizerKind::adam}, {"sgd", OptimizerKind::sgd}});
  c.optimizer.beta1 = r.get<double>("optimizer.beta1");
  c.optimizer.beta2 = r.get<double>("optimizer.beta2");
  c.optimizer.epsilon = r.get<double>("optimizer.epsilon");
  c.optimizer.clip_norm = r.optional<double>("optimizer.clip_norm");
  c.optimizer.weight_decay = r.get<double>("optimizer.weight_decay");
  c.seed = r.get<std::uint64_t>("seed");
  c.alignment.mode =
      r.choice("alignment.mode", {std::pair{"same_year", AlignmentMode::same_year}, {"lagged", AlignmentMode::lagged}});
  c.alignment.extend_first_year = r.get<bool>("alignment.extend_first_year");
  c.out = r.get<std::string>("out");
  c.synthetic.kind = r.get<std::string>("synthetic.kind");
  c.synthetic.symbols = r.get<std::size_t>("synthetic.symbols");
  c.synthetic.seed = r.get<std::uint64_t>("synthetic.seed");
  return c;
}

void check_learner(const LearnerConfig& l, const std::string& name) {
  if (l.hidden < 1) throw ConfigError("config field '" + name + ".hidden' must be at least 1");
  if (l.epochs < 1) throw ConfigError("config field '" + name + ".epochs' must be at least 1");
  if (l.batch_size < 1) throw ConfigError("config field '" + name + ".batch_size' must be at least 1");
  if (!(l.learning_rate > 0.0)) throw ConfigError("config field '" + name + ".learning_rate' must be positive");
  if (l.patience && *l.patience < 1) throw ConfigError("config field '" + name + ".patience' must be at least 1");
}

LstmTrainConfig lstm_config(const LearnerConfig& l, const OptimizerConfig& opt, std::uint64_t seed) {
  LstmTrainConfig c;
  c.hidden = l.hidden;
  c.epochs = l.epochs;
  c.batch_size = l.batch_size;
  c.optimizer = opt;
  c.optimizer.learning_rate = l.learning_rate;
  c.seed = seed;
  c.patience = l.patience;
  return c;
}

}  // namespace

void RunConfig::validate() const {
  try {
    split.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config field '") + e.what() + "'");
  }
  if (window_length < 1) throw ConfigError("config field 'window_length' must be at least 1");
  if (indicators.macd.fast < 1 || indicators.macd.slow < 1 || indicators.macd.signal < 1)
    throw ConfigError("config field 'indicators': periods must be at least 1");
  if (indicators.rsi_period < 1) throw ConfigError("config field 'indicators.rsi_period' must be at least 1");
  check_learner(learner1, "learner1");
  check_learner(learner2, "learner2");
  check_learner(daily, "daily");
  check_learner(mlp, "mlp");
  try {
    optimizer.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config field 'optimizer': ") + e.what());
  }
  if (!synthetic.kind.empty() && synthetic.kind != "drift" && synthetic.kind != "constant" && synthetic.kind != "ar1")
    throw ConfigError("config field 'synthetic.kind' must be drift, constant or ar1");
  if (!synthetic.kind.empty() && synthetic.symbols < 1)
    throw ConfigError("config field 'synthetic.symbols' must be at least 1");
}

void apply_synthetic_preset(RunConfig& c, const std::string& kind) {
  c.synthetic.kind = kind;
  c.prices = c.out / "raw" / "prices.csv";
  c.fundamentals = c.out / "raw" / "fundamentals.csv";
  c.ratio_names.clear();
  c.split = drift_split(DriftOptions{});
  c.annual_first_year = 0;
  c.window_length = 5;
  c.learner1 = {20, 100, 8, 0.005, std::nullopt};
  c.learner2 = {12, 100, 8, 0.0005, std::nullopt};
  c.daily = {12, 100, 8, 0.0005, std::nullopt};
  c.mlp = {10, 20, 32, 0.005, std::nullopt};
  if (kind == "constant") c.synthetic.symbols = 4;
}

RunConfig load_config(const std::string& file_text, const std::string& synthetic_kind) {
  RunConfig defaults;
  if (!synthetic_kind.empty()) apply_synthetic_preset(defaults, synthetic_kind);
  json base = to_json(defaults);
  if (!file_text.empty()) {
    json over;
    try {
      over = json::parse(file_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    overlay(base, over, "");
  }
  RunConfig c = from_json(base);
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_fingerprint(const RunConfig& config) {
  json j = to_json(config);
  j.erase("out");
  j["data"].erase("prices");
  j["data"].erase("fundamentals");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

VariantConfigs variant_configs(const RunConfig& c) {
  VariantConfigs v;
  v.ensemble.learner1 = lstm_config(c.learner1, c.optimizer, c.seed);
  v.ensemble.learner2 = lstm_config(c.learner2, c.optimizer, c.seed + 1);
  v.ensemble.window_length = c.window_length;
  v.ensemble.alignment = c.alignment;
  v.ensemble.last_training_year = last_complete_year(c.split.train_end);
  v.daily = lstm_config(c.daily, c.optimizer, c.seed + 2);
  v.mlp.hidden = c.mlp.hidden;
  v.mlp.epochs = c.mlp.epochs;
  v.mlp.batch_size = c.mlp.batch_size;
  v.mlp.optimizer = c.optimizer;
  v.mlp.optimizer.learning_rate = c.mlp.learning_rate;
  v.mlp.seed = c.seed + 3;
  return v;
}

PrepareOptions prepare_options(const RunConfig& c) {
  PrepareOptions p;
  p.split = c.split;
  p.indicators = c.indicators;
  p.impute = c.impute;
  p.window_length = c.window_length;
  p.annual_first_year = c.annual_first_year;
  return p;
}

}  // namespace twofreq
