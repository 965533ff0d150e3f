#pragma once

#include <stdexcept>
#include <string>

namespace drtrack {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands whose grid shapes or channel counts do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or missing input data (images, groundtruth, tables, configs).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical routine met NaN/Inf.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace drtrack
