#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

// Input-side failures: malformed files, invalid meshes, bad CLI arguments.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : InputError {
    explicit ParseError(const std::string& msg) : InputError(msg) {}
};

struct ValidationError : InputError {
    explicit ValidationError(const std::string& msg) : InputError(msg) {}
};

// Numerical failures: solver breakdown, non-convergence, ill-conditioned bases.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolveError : NumericError {
    explicit SolveError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace spectral
