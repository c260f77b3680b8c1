#pragma once

#include <stdexcept>
#include <string>

namespace landau {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the region where an operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An oscillatory phase is not resolved by the velocity grid.
class ResolutionError : public Error {
public:
    ResolutionError(const std::string& what, int required_nv)
        : Error(what), required_nv_(required_nv) {}
    [[nodiscard]] int required_nv() const noexcept { return required_nv_; }

private:
    int required_nv_;
};

/// A mode has not decayed at the edge of the truncated velocity domain.
class BoundaryDecayError : public Error {
public:
    BoundaryDecayError(const std::string& what, int k, double value)
        : Error(what), k_(k), value_(value) {}
    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    int k_;
    double value_;
};

/// An iterative method did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The time step exceeds the published stability heuristic.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double suggested_dt)
        : Error(what), suggested_dt_(suggested_dt) {}
    [[nodiscard]] double suggested_dt() const noexcept { return suggested_dt_; }

private:
    double suggested_dt_;
};

}  // namespace landau
