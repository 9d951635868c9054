#pragma once

#include <stdexcept>
#include <string>

namespace texbank {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or unreadable file, failed write.
class IoError : public Error {
public:
    using Error::Error;
};

/// File exists but its content cannot be decoded.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Image dimensions incompatible with the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient normal equations.
class SingularError : public Error {
public:
    using Error::Error;
};

class NameCollisionError : public Error {
public:
    using Error::Error;
};

/// Feature names or CSV columns do not match what was expected.
class SchemaError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

}  // namespace texbank
