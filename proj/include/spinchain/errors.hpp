// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace spinchain {

// Layout cannot be handled by the analytic (equal-well) path; callers should
// fall back to the dense spectral path.
class LayoutError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative solver failed to meet its accuracy contract.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The right-edge fidelity never rises above the transfer-detection floor.
class NoTransferError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config file problem, addressed by line number (0 = file-level).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          line_(line) {}
    ConfigError(const std::string& file, const std::string& what)
        : std::runtime_error(file + ": " + what), line_(0) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace spinchain
