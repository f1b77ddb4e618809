#pragma once

#include <stdexcept>
#include <string>

namespace wpt {

/// Parameter or precondition violation (bad user input, out-of-range value).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A design law hit a singularity (secant pole, zero resonance denominator).
class DegenerateDesignError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Numerical solve failed: singular period map, diverging integration, ...
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unknown configuration content.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wpt
