#pragma once

#include <stdexcept>
#include <string>

namespace sirtimes {

// Invalid argument or value outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Base for failures of a numerical procedure on valid input.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationStall : public NumericError {
public:
    IntegrationStall(const std::string& what, double reached)
        : NumericError(what), reached_time(reached) {}
    double reached_time;
};

class TimeCapExceeded : public NumericError {
public:
    TimeCapExceeded(const std::string& what, double cap)
        : NumericError(what), cap(cap) {}
    double cap;
};

class QuadratureFailure : public NumericError {
public:
    QuadratureFailure(const std::string& what, double estimate, double error)
        : NumericError(what), estimate(estimate), error_bound(error) {}
    double estimate;
    double error_bound;
};

// v(x, 0) for x > gamma/beta: susceptibles never reach the critical level.
class NeverReached : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StencilOutOfDomain : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace sirtimes
