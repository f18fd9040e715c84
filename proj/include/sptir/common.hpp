#pragma once

#include <stdexcept>
#include <string>

namespace sptir {

// Thrown when a numeric invariant breaks (NaN/Inf in an op result,
// diverging training loss). Mapped to exit code 3 by the CLI.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Task { kSr, kDenoise };

inline std::string to_string(Task t) { return t == Task::kSr ? "sr" : "denoise"; }

inline Task task_from_string(const std::string& s) {
    if (s == "sr") return Task::kSr;
    if (s == "denoise") return Task::kDenoise;
    throw std::invalid_argument("unknown task: " + s);
}

} // namespace sptir
