#pragma once

#include <stdexcept>
#include <string>

namespace ecdc {

/// Raised when parameters, policies or indices violate their admissible sets.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a linear solve or factorization cannot be completed.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, int level = -1)
        : std::runtime_error(what), level_(level) {}

    /// Level index at which the failure occurred, or -1 if not level specific.
    int level() const noexcept { return level_; }

private:
    int level_;
};

} // namespace ecdc
