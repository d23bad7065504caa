#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tabaudit {

/// Base class for every error raised by the library. Callers that only care
/// about "the audit step failed" catch this; finer-grained handlers catch the
/// subclasses below.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// dataset
class MalformedCsv : public Error {
public:
    MalformedCsv(std::size_t line, const std::string& what)
        : Error("malformed csv at line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class RowOutOfRange : public Error {
public:
    using Error::Error;
};

class DatasetError : public Error {
public:
    using Error::Error;
};

// stats
class ArityMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateSample : public Error {
public:
    using Error::Error;
};

class ConstantInput : public Error {
public:
    using Error::Error;
};

// llm
class AdapterError : public Error {
public:
    using Error::Error;
};

class AuthError : public AdapterError {
public:
    using AdapterError::AdapterError;
};

class RateLimitExhausted : public AdapterError {
public:
    using AdapterError::AdapterError;
};

class TransportError : public AdapterError {
public:
    using AdapterError::AdapterError;
};

class MalformedResponse : public AdapterError {
public:
    using AdapterError::AdapterError;
};

class ReplayMiss : public AdapterError {
public:
    using AdapterError::AdapterError;
};

class BudgetExceeded : public AdapterError {
public:
    using AdapterError::AdapterError;
};

class NoPerturbableFeature : public Error {
public:
    using Error::Error;
};

// prompt / battery
class TargetNotCategorical : public Error {
public:
    using Error::Error;
};

class InsufficientParseable : public Error {
public:
    using Error::Error;
};

// cli
class ConfigError : public Error {
public:
    using Error::Error;
};

class CorruptCache : public Error {
public:
    CorruptCache(std::size_t line, const std::string& what)
        : Error("corrupt cache at line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace tabaudit
