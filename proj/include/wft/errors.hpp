#pragma once

#include <stdexcept>
#include <string>

namespace wft {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One of the structural hypotheses on the laws fails at a sampled density.
class HypothesisViolation : public Error {
public:
    HypothesisViolation(std::string which, double rho)
        : Error(which + " violated at rho=" + std::to_string(rho)), which_(std::move(which)), rho_(rho) {}
    const std::string& which() const noexcept { return which_; }
    double rho() const noexcept { return rho_; }

private:
    std::string which_;
    double rho_;
};

class OrderingViolation : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class EqualDensities : public Error {
public:
    EqualDensities() : Error("sigma undefined: equal densities") {}
};

class NotOnMesh : public Error {
public:
    using Error::Error;
};

class EventOverflow : public Error {
public:
    using Error::Error;
};

class SamePhase : public Error {
public:
    SamePhase() : Error("states belong to the same phase") {}
};

class UnsupportedTestFunction : public Error {
public:
    using Error::Error;
};

class StructuralAssumptionViolated : public Error {
public:
    using Error::Error;
};

class OutOfWindow : public Error {
public:
    using Error::Error;
};

class NotReached : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A run-time invariant (TV, Temple functional, RH, ...) failed.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace wft
