#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcd {

// Every failure raised by the library derives from rcd::Error so callers can
// catch one type; the concrete class names the failure kind.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedModeError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class FitError : public Error {
public:
    using Error::Error;
};

} // namespace rcd

namespace rcd {

class SignError : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace rcd
