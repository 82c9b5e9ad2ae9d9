#ifndef COMPSURV_COMMON_HPP
#define COMPSURV_COMMON_HPP

#include <stdexcept>
#include <string>

namespace compsurv {

// Floors applied to fitted scale parameters so downstream divisions stay finite.
inline constexpr double kSigmaFloor = 1e-6;
inline constexpr double kCensorFloor = 1e-12;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kModelFormatVersion = "1";

/// Bad flags, bad schema, bad parameter ranges. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problems with the data or a computation at runtime. CLI maps this to exit code 1.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Level parsed once from COMPOSITE_SURV_LOG ({error|info|debug}, default error).
LogLevel log_level();

void log_warn(const std::string& msg);   // always shown
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

} // namespace compsurv

#endif
