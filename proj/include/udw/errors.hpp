#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace udw {

// Quadrature or extrapolation failed to reach its target; carries the best
// error estimate available at the point of failure.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double error_estimate)
        : std::runtime_error(what), estimate_(error_estimate) {}
    double error_estimate() const { return estimate_; }

private:
    double estimate_;
};

// An integral that has no finite value for the requested configuration
// (e.g. derivative coupling with a non-smooth switching on the coincident
// Minkowski spectrum).
class divergence_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

// Two independent evaluation routes disagreed beyond tolerance.
class cross_validation_error : public std::runtime_error {
public:
    cross_validation_error(const std::string& what, std::complex<double> a,
                           std::complex<double> b, double remnant = 0.0)
        : std::runtime_error(what), a_(a), b_(b), remnant_(remnant) {}
    std::complex<double> value_a() const { return a_; }
    std::complex<double> value_b() const { return b_; }
    // For time-ordered consistency checks: the estimated equal-time
    // commutator remnant that would explain the disagreement.
    double commutator_remnant() const { return remnant_; }

private:
    std::complex<double> a_, b_;
    double remnant_;
};

} // namespace udw
