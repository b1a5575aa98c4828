#pragma once

#include <stdexcept>
#include <string>

namespace eqrl {

// Invalid configuration value or malformed config file. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad runtime input: shape mismatch, too-short waveform, out-of-range parameter.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File read/write failure; message carries the path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Statistics preconditions violated (too few samples, zero variance, one class).
struct StatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training aborted (NaN gradients, single-class dataset).
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A pipeline command was invoked before its prerequisite produced an artifact.
// CLI maps this to exit code 3 and names the prerequisite command.
struct MissingArtifactError : std::runtime_error {
    std::string prerequisite;
    MissingArtifactError(const std::string& msg, std::string prereq)
        : std::runtime_error(msg), prerequisite(std::move(prereq)) {}
};

}  // namespace eqrl
