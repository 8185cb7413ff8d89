// Shared small datasets for the tests.
#pragma once

#include "twofreq/config.hpp"
#include "twofreq/evaluation.hpp"
#include "twofreq/pipeline.hpp"
#include "twofreq/synthetic.hpp"

namespace fixtures {

inline twofreq::PrepareOptions small_prepare(const twofreq::SplitSpec& split, std::size_t window = 5) {
  twofreq::PrepareOptions o;
  o.split = split;
  o.window_length = window;
  return o;
}

inline twofreq::PreparedData prepared(const twofreq::SyntheticMarket& m, const twofreq::SplitSpec& split,
                                      std::size_t window = 5) {
  const auto frames = twofreq::assemble_frames(m.prices, m.fundamentals, m.ratio_names);
  return twofreq::prepare(frames, small_prepare(split, window));
}

inline twofreq::PreparedData constant_data() {
  twofreq::ConstantOptions o;
  o.symbols = 3;
  o.ratios = 6;
  return prepared(twofreq::make_constant(o), twofreq::drift_split(twofreq::DriftOptions{}));
}

inline twofreq::PreparedData drift_data(std::size_t symbols = 4, std::uint64_t seed = 1) {
  twofreq::DriftOptions o;
  o.symbols = symbols;
  o.ratios = 8;
  o.seed = seed;
  return prepared(twofreq::make_annual_drift(o), twofreq::drift_split(o));
}

inline twofreq::EnsembleConfig tiny_ensemble(int last_training_year, std::size_t window = 5) {
  twofreq::EnsembleConfig c;
  c.learner1.hidden = 4;
  c.learner1.epochs = 5;
  c.learner2.hidden = 4;
  c.learner2.epochs = 2;
  c.learner2.seed = 43;
  c.window_length = window;
  c.last_training_year = last_training_year;
  c.alignment.extend_first_year = true;
  return c;
}

inline twofreq::VariantConfigs tiny_variants(int last_training_year) {
  twofreq::VariantConfigs v;
  v.ensemble = tiny_ensemble(last_training_year);
  v.daily.hidden = 4;
  v.daily.epochs = 2;
  v.mlp.hidden = 4;
  v.mlp.epochs = 2;
  return v;
}

}  // namespace fixtures
