#ifndef EXITSPEC_ERRORS_HPP
#define EXITSPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace exitspec {

// Error taxonomy shared by the library and the CLI exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation
// (e.g. radius past the conjugate point, r = 0 where a limit is required).
struct DomainError : Error {
    using Error::Error;
};

// Malformed or inconsistent input: files, expressions, configs, meshes.
struct ValidationError : Error {
    using Error::Error;
};

// A numeric procedure failed: quadrature did not converge, a quantity
// that must stay positive did not, a linear solve broke down.
struct NumericError : Error {
    using Error::Error;
};

// API misuse (index out of range, mismatched objects).
struct UsageError : Error {
    using Error::Error;
};

// A theorem hypothesis does not hold, so the bound is not asserted.
struct HypothesisError : Error {
    using Error::Error;
};

} // namespace exitspec

#endif
