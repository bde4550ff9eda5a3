#pragma once

#include <stdexcept>
#include <string>

namespace fracho {

/// Arguments outside the admissible range of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A series, quadrature or contour sum failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fracho
