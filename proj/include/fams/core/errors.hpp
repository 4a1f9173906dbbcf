#pragma once

#include <stdexcept>
#include <string>

namespace fams {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t < 0, sigma = 1, NaN input).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to reach its accuracy target.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Invalid mesh, exponent table or quadrature configuration.
class SetupError : public Error {
public:
    using Error::Error;
};

/// Sampled growth behaviour contradicts the declared growth indices.
class CertificationError : public Error {
public:
    using Error::Error;
};

/// A run configuration is malformed. `key()` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// The solver was called outside the growth regime it is valid for.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// A requested combination of inputs is inconsistent (for example a family of the wrong dimension).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace fams
