#pragma once

#include <stdexcept>
#include <string>

namespace darkmkt {

// Invalid parameters, states or requests. CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative method failed to reach its tolerance. CLI maps this to exit code 2.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// File / stream problems. CLI maps this to exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace darkmkt
