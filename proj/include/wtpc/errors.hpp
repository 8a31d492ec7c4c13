#pragma once

#include <stdexcept>
#include <string>

namespace wtpc {

/// Base class for all library failures; subclasses map to distinct CLI exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text: unreadable rows, bad timestamps, duplicate timestamps.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A required column is absent or the column mapping is inconsistent.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a precondition (empty data, constant
/// temperature column, insufficient samples, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Estimation failure: rank-deficient design, nonconvergence, invalid orders.
class FitError : public Error {
public:
    using Error::Error;
};

/// A prerequisite artifact (model file, profile, ...) is missing or unreadable.
class ArtifactError : public Error {
public:
    using Error::Error;
};

/// Output could not be written (permissions, full disk, bad target path).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace wtpc
