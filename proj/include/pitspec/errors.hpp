#pragma once

#include <stdexcept>

namespace pitspec {

/// Unreadable, empty or malformed input data.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Estimation could not produce usable parameters.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too many bootstrap refits failed for the reference distribution to be trusted.
struct BootstrapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed experiment plan or option set.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace pitspec
