#include "compsurv/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace compsurv {

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("COMPOSITE_SURV_LOG");
        if (env == nullptr) return LogLevel::Error;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

void log_warn(const std::string& msg) {
    std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info)
        std::fprintf(stderr, "info: %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug)
        std::fprintf(stderr, "debug: %s\n", msg.c_str());
}

} // namespace compsurv
