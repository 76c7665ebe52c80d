#pragma once

#include <stdexcept>
#include <string>

namespace funiform {

/// Raised on malformed arguments, out-of-domain evaluations and bad files.
/// Mapped to process exit code 1 by the command line driver.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical routine cannot reach its accuracy contract
/// (quadrature cap exceeded, singular system, failed bracketing).
/// Mapped to process exit code 2 by the command line driver.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace funiform
