#pragma once

#include <stdexcept>
#include <string>

namespace rdl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejected inputs: broken invariants, mismatched shapes, bad flags.
struct InvalidInput : Error {
    using Error::Error;
};

// A scalar function was applied outside its domain on the spectrum.
struct DomainError : Error {
    using Error::Error;
};

// Division by an operator that is not (numerically) positive definite.
struct SingularDivisor : Error {
    using Error::Error;
};

// Operation only implemented for specific dimensions (e.g. qubit oracles).
struct UnsupportedDimension : Error {
    using Error::Error;
};

// Construction would exceed the dimension ceiling.
struct SizeError : Error {
    using Error::Error;
};

// An iterative solver ran out of iterations before meeting its tolerance.
// `best_value` is the objective at the best iterate reached; solvers with
// richer state derive from this and attach the iterate itself.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double best)
        : Error(what), best_value(best) {}
    double best_value;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace rdl
