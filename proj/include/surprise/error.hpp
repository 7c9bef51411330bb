#pragma once

#include <stdexcept>
#include <string>

namespace surprise {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the inputs of an operation was violated.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The data admit no well-defined answer (zero variance, separation, rank deficiency).
class Degenerate : public Error {
public:
    using Error::Error;
};

/// An iterative procedure ran out of iterations.
class NotConverged : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InvalidInput(message);
    }
}

} // namespace surprise
