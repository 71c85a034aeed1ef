#pragma once

#include <stdexcept>
#include <string>

namespace wd3 {

// Thrown when a computation produces or receives non-finite values.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by the config parser; carries the offending line (1-based, 0 = no line).
struct ConfigError : std::runtime_error {
    int line;
    explicit ConfigError(const std::string& msg, int line_no = 0)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
};

}  // namespace wd3
