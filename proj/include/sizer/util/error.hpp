#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sizer {

/// Invalid or inconsistent configuration (files, flags, shapes of inputs).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A simulator backend could not produce metrics for a design.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor or network shape mismatch, including incompatible checkpoints.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure (non-finite gradients, losses, or metrics).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sizer
