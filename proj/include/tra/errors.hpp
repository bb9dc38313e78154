#pragma once

#include <stdexcept>
#include <string>

namespace tra {

// Base for every library error. `code` is a short machine-readable tag
// (e.g. "pole", "regime") that the CLI copies into its error object.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Bad input: parameter ranges, regimes, routes, degrees. CLI exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Valid input but the computation failed (non-convergence, eigensolver). Exit 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace tra
