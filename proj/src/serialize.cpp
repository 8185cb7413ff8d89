#include "twofreq/serialize.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "twofreq/error.hpp"

namespace twofreq {
namespace {

using nlohmann::json;

constexpr const char* kGateNames[] = {"input", "forget", "output", "candidate"};

json to_json(const NormStats& s) { return {{"names", s.names}, {"mean", s.mean}, {"stddev", s.stddev}}; }

NormStats stats_from(const json& j) {
  NormStats s{j.at("names").get<std::vector<std::string>>(), j.at("mean").get<std::vector<double>>(),
              j.at("stddev").get<std::vector<double>>()};
  if (s.mean.size() != s.names.size() || s.stddev.size() != s.names.size())
    throw Error("model file: inconsistent normalization statistics");
  return s;
}

json to_json(const std::map<std::string, NormStats>& m) {
  json j = json::object();
  for (const auto& [symbol, s] : m) j[symbol] = to_json(s);
  return j;
}

std::map<std::string, NormStats> stats_map_from(const json& j) {
  std::map<std::string, NormStats> m;
  for (const auto& [symbol, s] : j.items()) m.emplace(symbol, stats_from(s));
  return m;
}

json to_json(const LstmParams& p) {
  const std::size_t H = p.hidden_size();
  json gates = json::object();
  for (std::size_t g = 0; g < 4; ++g) {
    const MatrixView w = p.gate_weights(static_cast<Gate>(g));
    const auto b = p.gate_bias(static_cast<Gate>(g));
    gates[kGateNames[g]] = {{"weights", std::vector<double>(w.data.begin(), w.data.end())},
                            {"bias", std::vector<double>(b.begin(), b.end())}};
  }
  return {{"input_size", p.input_size()}, {"hidden_size", H}, {"gates", gates}, {"head", p.head},
          {"head_bias", p.head_bias}};
}

LstmParams lstm_from(const json& j) {
  const auto F = j.at("input_size").get<std::size_t>();
  const auto H = j.at("hidden_size").get<std::size_t>();
  LstmParams p = lstm_zeros(F, H);
  for (std::size_t g = 0; g < 4; ++g) {
    const json& gate = j.at("gates").at(kGateNames[g]);
    const auto w = gate.at("weights").get<std::vector<double>>();
    const auto b = gate.at("bias").get<std::vector<double>>();
    if (w.size() != H * (F + H) || b.size() != H)
      throw Error(std::string("model file: gate '") + kGateNames[g] + "' has the wrong shape");
    std::copy(w.begin(), w.end(), p.weights.values().begin() + static_cast<long>(g * H * (F + H)));
    std::copy(b.begin(), b.end(), p.bias.begin() + static_cast<long>(g * H));
  }
  p.head = j.at("head").get<std::vector<double>>();
  p.head_bias = j.at("head_bias").get<double>();
  p.validate();
  return p;
}

json to_json(const MlpModel& m) {
  return {{"inputs", m.inputs()}, {"hidden", m.hidden()},
          {"w1", std::vector<double>(m.w1.values().begin(), m.w1.values().end())},
          {"b1", m.b1}, {"w2", m.w2}, {"b2", m.b2}};
}

MlpModel mlp_from(const json& j) {
  const auto inputs = j.at("inputs").get<std::size_t>();
  const auto hidden = j.at("hidden").get<std::size_t>();
  MlpModel m;
  m.w1 = Matrix(hidden, inputs, j.at("w1").get<std::vector<double>>());
  m.b1 = j.at("b1").get<std::vector<double>>();
  m.w2 = j.at("w2").get<std::vector<double>>();
  m.b2 = j.at("b2").get<double>();
  if (m.b1.size() != hidden || m.w2.size() != hidden) throw Error("model file: mlp has the wrong shape");
  return m;
}

json to_json(const AlignmentRule& r) {
  return {{"mode", r.mode == AlignmentMode::same_year ? "same_year" : "lagged"},
          {"extend_first_year", r.extend_first_year}};
}

AlignmentRule alignment_from(const json& j) {
  AlignmentRule r;
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "same_year") r.mode = AlignmentMode::same_year;
  else if (mode == "lagged") r.mode = AlignmentMode::lagged;
  else throw Error("model file: unknown alignment mode '" + mode + "'");
  r.extend_first_year = j.at("extend_first_year").get<bool>();
  return r;
}

json to_json(const AnnualLearner& l) {
  json table = json::array();
  for (const auto& [key, value] : l.table.values) table.push_back({key.first, key.second, value});
  return {{"params", to_json(l.params)},
          {"ratio_names", l.ratio_names},
          {"ratio_stats", to_json(l.ratio_stats)},
          {"close_stats", to_json(l.close_stats)},
          {"last_training_year", l.last_training_year},
          {"table", table}};
}

AnnualLearner learner_from(const json& j) {
  AnnualLearner l;
  l.params = lstm_from(j.at("params"));
  l.ratio_names = j.at("ratio_names").get<std::vector<std::string>>();
  l.ratio_stats = stats_map_from(j.at("ratio_stats"));
  l.close_stats = stats_map_from(j.at("close_stats"));
  l.last_training_year = j.at("last_training_year").get<int>();
  for (const auto& e : j.at("table"))
    l.table.values[{e.at(0).get<std::string>(), e.at(1).get<int>()}] = e.at(2).get<double>();
  return l;
}

}  // namespace

std::string model_to_json(const ModelFile& file) {
  json j;
  j["format"] = "twofreq-model";
  j["version"] = kModelFormatVersion;
  j["variant"] = variant_name(file.variant);
  j["config_fingerprint"] = file.config_fingerprint;
  if (const auto* e = std::get_if<EnsembleModel>(&file.model)) {
    j["window_length"] = e->window_length;
    j["features"] = e->features;
    j["alignment"] = to_json(e->alignment);
    j["learner1"] = to_json(e->learner1);
    j["learner2"] = to_json(e->learner2);
    j["daily_stats"] = to_json(e->daily_stats);
  } else if (const auto* d = std::get_if<DailyModel>(&file.model)) {
    j["window_length"] = d->window_length;
    j["features"] = d->features;
    j["stats"] = to_json(d->stats);
    if (const auto* m = std::get_if<MlpModel>(&d->network)) j["mlp"] = to_json(*m);
    else j["lstm"] = to_json(std::get<LstmParams>(d->network));
  } else {
    const auto& a = std::get<AnnualModel>(file.model);
    j["alignment"] = to_json(a.alignment);
    j["learner1"] = to_json(a.learner);
  }
  return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "twofreq-model") throw Error("not a twofreq model file");
  const int version = j.value("version", 0);
  if (version != kModelFormatVersion)
    throw Error("unsupported model file version " + std::to_string(version) + " (expected " +
                std::to_string(kModelFormatVersion) + ")");
  try {
    ModelFile file;
    file.variant = parse_variant(j.at("variant").get<std::string>());
    file.config_fingerprint = j.value("config_fingerprint", "");
    switch (file.variant) {
      case Variant::ensemble: {
        EnsembleModel e;
        e.window_length = j.at("window_length").get<std::size_t>();
        e.features = j.at("features").get<std::vector<std::string>>();
        e.alignment = alignment_from(j.at("alignment"));
        e.learner1 = learner_from(j.at("learner1"));
        e.learner2 = lstm_from(j.at("learner2"));
        e.daily_stats = stats_map_from(j.at("daily_stats"));
        if (e.learner2.input_size() != e.features.size())
          throw Error("model file: learner 2 input size does not match the feature list");
        file.model = std::move(e);
        break;
      }
      case Variant::daily:
      case Variant::mlp: {
        DailyModel d;
        d.window_length = j.at("window_length").get<std::size_t>();
        d.features = j.at("features").get<std::vector<std::string>>();
        d.stats = stats_map_from(j.at("stats"));
        if (file.variant == Variant::mlp) d.network = mlp_from(j.at("mlp"));
        else d.network = lstm_from(j.at("lstm"));
        file.model = std::move(d);
        break;
      }
      case Variant::annual:
        file.model = AnnualModel{learner_from(j.at("learner1")), alignment_from(j.at("alignment"))};
        break;
    }
    return file;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  } catch (const ShapeError& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) { write_text(path, model_to_json(file)); }

ModelFile load_model(const std::filesystem::path& path) { return model_from_json(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace twofreq
