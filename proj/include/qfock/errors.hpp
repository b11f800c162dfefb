#pragma once

#include <stdexcept>
#include <string>

namespace qfock {

// A caller-side contract was violated (bad parameters, mismatched spaces,
// degree budgets, q^2 d <= 1 for certificates, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical breakdown: ill-conditioned Gram blocks, failed residual checks.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qfock
