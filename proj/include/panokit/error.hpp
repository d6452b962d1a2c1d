#pragma once

#include <stdexcept>
#include <string>

namespace panokit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed something outside an operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two tensors that must agree in shape do not.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// A file on disk is malformed or truncated.
class CorruptFile : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace panokit
