#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shagcl {

/// Tensor shape / dimension violations.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid predicate vocabulary input (duplicate names, non-positive counts).
struct VocabError : std::runtime_error {
    explicit VocabError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value (mu < 1, unknown strategy, bad ranges, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent or unknown data fed to an operation.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file; carries the 1-based offending line when known.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    std::size_t line_number;
};

/// Out-of-range index into an indexed collection (group/classifier ids).
struct IndexError : std::runtime_error {
    explicit IndexError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during training (NaN/Inf loss); carries the step.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_number(step) {}
    std::size_t step_number;
};

}  // namespace shagcl
