#pragma once

// Minimal stderr logging gated by SKILLGAUGE_LOG={error,warn,info,debug}.
// Default level is warn.

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace skillgauge::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level level_from_env() {
  const char* env = std::getenv("SKILLGAUGE_LOG");
  if (!env) return Level::Warn;
  const std::string_view v(env);
  if (v == "error") return Level::Error;
  if (v == "warn") return Level::Warn;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

inline Level active_level() {
  static const Level level = level_from_env();
  return level;
}

inline void write(Level level, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(level) > static_cast<int>(active_level())) return;
  std::cerr << "[" << tag << "] " << msg << "\n";
}

inline void error(std::string_view msg) { write(Level::Error, "error", msg); }
inline void warn(std::string_view msg) { write(Level::Warn, "warn", msg); }
inline void info(std::string_view msg) { write(Level::Info, "info", msg); }
inline void debug(std::string_view msg) { write(Level::Debug, "debug", msg); }

}  // namespace skillgauge::log
