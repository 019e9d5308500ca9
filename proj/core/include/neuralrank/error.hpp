#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace neuralrank {

/// Base of every error raised by the library. Loaders and scorers never
/// return partially populated values; they throw one of these instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (row count, label set, finiteness...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bytes do not follow the NRNK container layout (magic, version, header JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Payload shorter or longer than the header declares.
class TruncationError : public FormatError {
public:
    TruncationError(const std::string& what, std::uint64_t offset)
        : FormatError(what), offset_(offset) {}

    /// Byte offset at which the payload stopped matching the declared size.
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A manifest entry points at a file that does not exist.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Unknown model id or unsatisfiable layer selector.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Zero-norm vector where cosine distance needs a direction.
class DegenerateVectorError : public Error {
public:
    DegenerateVectorError(const std::string& what, std::int64_t row = -1)
        : Error(what), row_(row) {}

    /// Offending row, or -1 when the error is not tied to a matrix row.
    std::int64_t row() const noexcept { return row_; }

private:
    std::int64_t row_;
};

}  // namespace neuralrank
