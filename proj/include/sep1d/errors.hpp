#pragma once

#include <stdexcept>
#include <string>

namespace sep1d {

/// Base class for all failures raised by the library.
struct SimError : std::runtime_error {
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

/// Density reached zero or below somewhere on the grid.
struct VacuumError : SimError {
    explicit VacuumError(const std::string& what) : SimError(what) {}
};

/// Subsonic margin P'(rho) - J^2/rho^2 lost its positive sign.
struct SupersonicError : SimError {
    explicit SupersonicError(const std::string& what) : SimError(what) {}
};

/// Iterative solver failed to reach its tolerance.
struct ConvergenceError : SimError {
    explicit ConvergenceError(const std::string& what) : SimError(what) {}
};

/// Root bracketing failed (voltage-to-current map).
struct BracketError : SimError {
    explicit BracketError(const std::string& what) : SimError(what) {}
};

/// Grid functions of mismatched length were combined.
struct ShapeError : SimError {
    explicit ShapeError(const std::string& what) : SimError(what) {}
};

/// Grid too coarse for the requested stencil.
struct GridTooCoarseError : SimError {
    explicit GridTooCoarseError(const std::string& what) : SimError(what) {}
};

/// Time step exceeds the stability bound.
struct StepSizeError : SimError {
    explicit StepSizeError(const std::string& what) : SimError(what) {}
};

/// Symmetrizer weight failed to stay positive.
struct PositivityError : SimError {
    explicit PositivityError(const std::string& what) : SimError(what) {}
};

/// Not enough data points for the requested statistic.
struct InsufficientDataError : SimError {
    explicit InsufficientDataError(const std::string& what) : SimError(what) {}
};

/// Invalid argument outside a function's domain.
struct DomainError : SimError {
    explicit DomainError(const std::string& what) : SimError(what) {}
};

/// Configuration value failed validation; message names the field.
struct ConfigError : SimError {
    explicit ConfigError(const std::string& what) : SimError(what) {}
};

} // namespace sep1d
