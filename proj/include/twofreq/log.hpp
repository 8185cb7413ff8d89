#pragma once

#include <sstream>
#include <string>

namespace twofreq::log {

enum class Level { quiet = 0, warn = 1, info = 2, debug = 3 };

/// Current verbosity. Initialized from TWOFREQ_LOG (quiet|warn|info|debug),
/// defaulting to warn.
Level level();
void set_level(Level lvl);

void write(Level lvl, const std::string& message);

template <typename... Args>
void warn(const Args&... args) {
  if (level() < Level::warn) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::warn, os.str());
}

template <typename... Args>
void info(const Args&... args) {
  if (level() < Level::info) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::info, os.str());
}

template <typename... Args>
void debug(const Args&... args) {
  if (level() < Level::debug) return;
  std::ostringstream os;
  (os << ... << args);
  write(Level::debug, os.str());
}

}  // namespace twofreq::log
