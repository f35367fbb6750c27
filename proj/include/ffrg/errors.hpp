#pragma once

#include <stdexcept>
#include <string>

namespace ffrg {

// Input that cannot be decoded (bad JSON, wrong field types).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

// Decoded input that violates a data-model invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration: dimension mismatch, out-of-range hyperparameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ffrg
