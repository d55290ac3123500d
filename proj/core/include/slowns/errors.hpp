#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slowns {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a constitutive law or operator.
class DomainError : public Error {
public:
    using Error::Error;
};

// Bad configuration value. key() names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Step rejected after the allowed number of dt halvings.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double t, long slice)
        : Error(what), t_(t), slice_(slice) {}
    double time() const noexcept { return t_; }
    long slice() const noexcept { return slice_; }  // -1 when not a slab run

private:
    double t_;
    long slice_;
};

class PositivityLoss : public SolverError {
public:
    using SolverError::SolverError;
};

class Blowup : public SolverError {
public:
    using SolverError::SolverError;
};

class BoxTooSmall : public Error {
public:
    using Error::Error;
};

class UndefinedRatio : public Error {
public:
    using Error::Error;
};

// Input rejected because a stated precondition does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Grids or times of two inputs do not line up.
class MismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace slowns
