#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

/// Input outside a type's invariants (bad degree, alpha <= -1, grid too small, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two vortices, or a vortex and a fixed pole, closer than the collision epsilon.
class CollisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative method hit its iteration or step cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point outside the natural domain of a stationary problem.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Too much spectral energy near the Nyquist band.
class AliasingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kirchhoff
