#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace encore {

// Log level from ENCORE_LOG (error|info|debug), default info.
enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ENCORE_LOG");
    if (env == nullptr) {
      return LogLevel::info;
    }
    const std::string v(env);
    if (v == "error") {
      return LogLevel::error;
    }
    if (v == "debug") {
      return LogLevel::debug;
    }
    return LogLevel::info;
  }();
  return level;
}

inline void log_error(const std::string& msg) {
  std::fprintf(stderr, "[encore:error] %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) {
    std::fprintf(stderr, "[encore] %s\n", msg.c_str());
  }
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) {
    std::fprintf(stderr, "[encore:debug] %s\n", msg.c_str());
  }
}

}  // namespace encore
