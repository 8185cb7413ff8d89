#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "twofreq/ensemble.hpp"
#include "twofreq/evaluation.hpp"
#include "twofreq/variants.hpp"

namespace twofreq {

inline constexpr int kModelFormatVersion = 1;

/// The annual-only variant: learner 1 plus the rule that maps a date to a year.
struct AnnualModel {
  AnnualLearner learner;
  AlignmentRule alignment;

  bool operator==(const AnnualModel&) const = default;
};

struct ModelFile {
  Variant variant = Variant::ensemble;
  std::string config_fingerprint;
  std::variant<EnsembleModel, DailyModel, AnnualModel> model;
};

std::string model_to_json(const ModelFile& file);
/// Throws Error on a wrong format tag, an unsupported version, or a malformed document.
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace twofreq
