#pragma once

#include <stdexcept>
#include <string>

namespace aqnn {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller supplied an argument or configuration that violates a precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input data is malformed or internally inconsistent (parse errors, dimension mismatches).
class DataError : public Error {
public:
    using Error::Error;
};

/// The query has no usable neighborhood, so the requested aggregate is undefined.
class DegenerateQuery : public Error {
public:
    using Error::Error;
};

}  // namespace aqnn
