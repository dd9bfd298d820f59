#pragma once

#include <stdexcept>
#include <string>

namespace subh {

/// Base class for all failures raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// weights
class NoSignChangeError : public Error {
public:
    using Error::Error;
};
class DefiniteWeightError : public Error {
public:
    using Error::Error;
};

// nonlinearity
class BadParamsError : public Error {
public:
    using Error::Error;
};

// dynamics
class BlowUpError : public Error {
public:
    BlowUpError(double t_last_, const std::string& what) : Error(what), t_last(t_last_) {}
    double t_last;  ///< last time at which the state was still finite
};
class StepUnderflowError : public Error {
public:
    StepUnderflowError(double t_, const std::string& what) : Error(what), t(t_) {}
    double t;
};

// periodic
class SingularJacobianError : public Error {
public:
    using Error::Error;
};
class NoConvergenceError : public Error {
public:
    using Error::Error;
};
class AmbiguousClassificationError : public Error {
public:
    using Error::Error;
};
class ExceedsRError : public Error {
public:
    using Error::Error;
};

// spectral
class BracketFailureError : public Error {
public:
    using Error::Error;
};
class IntegrationFailureError : public Error {
public:
    using Error::Error;
};

// oscillation
class DegenerateDifferenceError : public Error {
public:
    using Error::Error;
};
class OriginHitError : public Error {
public:
    using Error::Error;
};

// combinatorics
class TooLargeError : public Error {
public:
    using Error::Error;
};

// cli / config
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace subh
