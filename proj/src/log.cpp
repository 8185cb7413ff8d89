#include "twofreq/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace twofreq::log {
namespace {

Level from_env() {
  const char* env = std::getenv("TWOFREQ_LOG");
  if (env == nullptr) return Level::warn;
  const std::string_view v(env);
  if (v == "quiet") return Level::quiet;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

Level& current() {
  static Level lvl = from_env();
  return lvl;
}

}  // namespace

Level level() { return current(); }
void set_level(Level lvl) { current() = lvl; }

void write(Level lvl, const std::string& message) {
  const char* tag = lvl == Level::warn ? "warning" : lvl == Level::info ? "info" : "debug";
  std::cerr << "[" << tag << "] " << message << '\n';
}

}  // namespace twofreq::log
