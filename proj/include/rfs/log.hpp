#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace rfs::logging {

enum class Level { quiet = 0, info = 1, debug = 2 };

/// Level from the RFS_LOG environment variable ("info", "debug", or a
/// number); messages at or below the level are written to stderr.
inline Level level() {
    static Level cached = [] {
        const char* raw = std::getenv("RFS_LOG");
        if (!raw) return Level::quiet;
        std::string s(raw);
        if (s == "debug" || s == "2") return Level::debug;
        if (s == "info" || s == "1") return Level::info;
        return Level::quiet;
    }();
    return cached;
}

inline void info(const std::string& msg) {
    if (level() >= Level::info) std::cerr << "[info] " << msg << '\n';
}

inline void debug(const std::string& msg) {
    if (level() >= Level::debug) std::cerr << "[debug] " << msg << '\n';
}

}  // namespace rfs::logging
