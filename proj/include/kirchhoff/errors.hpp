#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector lengths do not match each other or the operator.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numeric parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The model itself is inconsistent (e.g. m returned a negative value).
class ModelError : public Error {
public:
    using Error::Error;
};

/// phi evaluated to a nonpositive value on a checked grid.
class InvalidWeightError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// omega(|a-b|) == 0 while m(a) != m(b).
class DegenerateModulusError : public ModelError {
public:
    using ModelError::ModelError;
};

/// epsilon(lambda) cannot be obtained because h(eps) = eps*sqrt(omega(eps)) is not invertible.
class ScheduleError : public ModelError {
public:
    using ModelError::ModelError;
};

/// Initial data violate the nondegeneracy criterion, or t(s) is not integrable.
class DegenerateDataError : public ModelError {
public:
    using ModelError::ModelError;
};

/// psi is constant on the sampled window.
class StationaryDataError : public ModelError {
public:
    using ModelError::ModelError;
};

/// Two sampled curves do not share a grid.
class ResamplingError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// 2<A^{1/2}z, w> <= 0 where the s-system needs it positive.
class SingularDenominatorError : public Error {
public:
    SingularDenominatorError(double s, double denom)
        : Error("singular denominator at s=" + std::to_string(s) + " (d=" + std::to_string(denom) + ")"),
          s_(s), denom_(denom) {}

    double s() const noexcept { return s_; }
    double denominator() const noexcept { return denom_; }

private:
    double s_;
    double denom_;
};

/// The time integration produced a non-finite state.
class DivergenceError : public Error {
public:
    explicit DivergenceError(double last_good_time)
        : Error("integration diverged after t=" + std::to_string(last_good_time)),
          last_good_time_(last_good_time) {}

    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

/// Malformed scenario configuration.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace kirchhoff
