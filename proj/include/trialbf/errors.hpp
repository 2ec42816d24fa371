#pragma once

#include <stdexcept>
#include <string>

namespace trialbf {

/// Argument outside the mathematical domain of a function (e.g. df <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// User-supplied study data or test settings violate an invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate
/// (natural log of the integral) and its relative error bound.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double best_log_estimate, double error_bound)
        : NumericalError(what), best_log_estimate_(best_log_estimate), error_bound_(error_bound) {}

    double best_log_estimate() const noexcept { return best_log_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_log_estimate_;
    double error_bound_;
};

}  // namespace trialbf
