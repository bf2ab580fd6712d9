#pragma once

#include <stdexcept>
#include <string>

namespace thinflow {

// Bad input: shape, range, consistency of data. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A requested derivative order exceeds what an x1-function can supply.
class OrderOverflow : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Numerical failure inside a solve. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thinflow
