#pragma once

#include <complex>

namespace udw {

// Faddeeva function w(z) = e^{-z^2} erfc(-iz).
//
// Upper half-plane (Im z >= 0): Weideman 40-term rational approximation for
// moderate |z|, Gautschi continued fraction for |z| > 7. Lower half-plane via
// the reflection w(z) = 2 e^{-z^2} - w(-z) (overflows once Im z is large and
// negative relative to |Re z|, as does the function itself).
//
// Absolute/relative accuracy ~1e-13 over the upper half-plane.
std::complex<double> faddeeva_w(std::complex<double> z);

// erfc(z) for Re z >= -25 or so, computed as e^{-z^2} w(iz); stable where the
// scaled form is (used by the incomplete Gaussian transforms, which combine
// the e^{-z^2} factor analytically and call faddeeva_w directly instead).
std::complex<double> erfc_via_w(std::complex<double> z);

} // namespace udw
