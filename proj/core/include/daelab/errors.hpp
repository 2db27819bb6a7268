#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace daelab {

// Every error raised by the library derives from Error so callers (the CLI in
// particular) can map a category to an exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes or widths that do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A caller broke a documented precondition (bad flag value, index out of range).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Internal usage contract violated, e.g. backward() on a non-scalar.
class ContractError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

// Batch min-max and interpolation need at least two rows in train mode.
class BatchTooSmallError : public Error {
public:
    using Error::Error;
};

// Numerically degenerate input: all-zero spectrum, collapsed latents, ...
class DegenerateError : public Error {
public:
    using Error::Error;
};

class MetricUndefinedError : public DegenerateError {
public:
    using DegenerateError::DegenerateError;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed binary file; `offset` is the byte position where decoding failed.
class FormatError : public IoError {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : IoError(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

// Generated data would exceed the configured size limit.
class SizeError : public Error {
public:
    using Error::Error;
};

}  // namespace daelab
