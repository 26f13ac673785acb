// rabi_stark/errors.hpp: exception types shared by every solver
#pragma once

#include <stdexcept>
#include <string>

namespace rabi_stark {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters are valid physics but belong to the other solution pathway
/// (|U| < 2ω vs |U| = 2ω), or violate a basic invariant.
class RegimeError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Trial energy sits inside the exclusion radius of a pole of the G-function.
class PoleProximityError : public Error {
public:
    PoleProximityError(int index, double energy)
        : Error("energy " + std::to_string(energy) + " is within the exclusion radius of pole n=" +
                std::to_string(index)),
          index_(index) {}

    [[nodiscard]] int index() const noexcept { return index_; }

private:
    int index_;
};

/// A ratio or expectation value diverges at the requested point.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// No ground-state level crossing exists (U <= 0).
class NoFirstOrderTransition : public Error {
public:
    using Error::Error;
};

/// Lower collapse branch requested at or above the critical coupling.
class NoLowerBranch : public Error {
public:
    using Error::Error;
};

/// A Juddian crossing formula has no real solution for the requested index.
class NoCrossing : public Error {
public:
    using Error::Error;
};

class NoBracket : public Error {
public:
    using Error::Error;
};

}  // namespace rabi_stark
