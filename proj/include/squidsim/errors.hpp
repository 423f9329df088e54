#pragma once

#include <stdexcept>
#include <string>

namespace squidsim {

struct SquidError : std::runtime_error {
    explicit SquidError(const std::string& what) : std::runtime_error(what) {}
};

/// Circuit parameters outside the bistable window 1 < beta < 5*pi/2.
struct NotBistable : SquidError {
    using SquidError::SquidError;
};

/// Quartic parameters that do not correspond to a physical ring
/// (mu >= 3*lambda/(2*pi^2), up to a small guard band at the pole).
struct NotPhysical : SquidError {
    using SquidError::SquidError;
};

struct ConvergenceFailure : SquidError {
    using SquidError::SquidError;
};

struct GridTooCoarse : SquidError {
    using SquidError::SquidError;
};

struct IndexOutOfRange : SquidError {
    using SquidError::SquidError;
};

/// Wavepacket support (5 sigma) leaves the computational grid.
struct SupportOverflow : SquidError {
    using SquidError::SquidError;
};

struct GridMismatch : SquidError {
    using SquidError::SquidError;
};

/// Projected state captures too little of the wavefunction norm.
struct InsufficientCapture : SquidError {
    using SquidError::SquidError;
};

/// Trajectory jump probability per step exceeded the allowed bound.
struct StepTooLarge : SquidError {
    using SquidError::SquidError;
};

struct ConfigError : SquidError {
    using SquidError::SquidError;
};

} // namespace squidsim
