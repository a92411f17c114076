#pragma once

#include <stdexcept>
#include <string>

namespace rql {

/// Base class for every error raised by the library. The C API maps each
/// subclass onto one status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument value (bad width, empty grid, fraction out of range).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed netlist: arity mismatch, cycle, unassigned phase.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Missing or inconsistent configuration (gate table, timing annotations).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Requested matching-network specification cannot be met.
class DesignError : public Error {
public:
    DesignError(const std::string& what, double achievable_ripple_db)
        : Error(what), achievable_ripple_db_(achievable_ripple_db) {}

    double achievable_ripple_db() const noexcept { return achievable_ripple_db_; }

private:
    double achievable_ripple_db_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace rql
