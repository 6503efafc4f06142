#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dirireg {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Matrix/vector shapes do not conform.
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// Data carries no usable signal (e.g. zero sample variance).
struct DegenerateDataError : Error {
    explicit DegenerateDataError(const std::string& msg) : Error(msg) {}
};

/// An iterative procedure failed to converge; carries the last iterate.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, std::vector<double> last)
        : Error(msg), last_iterate(std::move(last)) {}
    std::vector<double> last_iterate;
};

/// A sampler or fit could not be started (non-finite target, bad design).
struct InitializationError : Error {
    explicit InitializationError(const std::string& msg) : Error(msg) {}
};

/// Not enough information to compute requested diagnostics.
struct DiagnosticsError : Error {
    explicit DiagnosticsError(const std::string& msg) : Error(msg) {}
};

}  // namespace dirireg
