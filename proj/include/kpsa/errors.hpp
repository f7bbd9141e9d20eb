#pragma once

#include <stdexcept>
#include <string>

namespace kpsa {

// Malformed input data (TNTP streams, inconsistent metadata, bad values).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition of a solver/metrics operation was violated.
class InvalidInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure while writing an output sink.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A demand pair whose destination cannot be reached from its origin.
class UnreachableOdError : public std::runtime_error {
public:
    UnreachableOdError(int origin, int destination)
        : std::runtime_error("unreachable OD pair (" + std::to_string(origin) + ", " +
                             std::to_string(destination) + ")"),
          origin(origin),
          destination(destination) {}

    int origin;
    int destination;
};

}  // namespace kpsa
