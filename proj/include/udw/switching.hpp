#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace udw {

using cd = std::complex<double>;

enum class SwitchingKind { Gaussian, CompactCosine, CompactCosineSq, Tabulated };

// A switching function chi(tau) with interaction timescale T (the value of
// its integral) and optional centre offset. The three analytic kinds:
//   Gaussian:        exp(-(tau-c)^2 / 2T^2) / sqrt(2 pi)
//   CompactCosine:   (pi/2) cos(pi (tau-c)/T)      for |tau-c| < T/2, else 0
//   CompactCosineSq: 2 cos^2(pi (tau-c)/T)         for |tau-c| < T/2, else 0
// Tabulated: piecewise-linear through samples, zero outside their range.
struct SwitchingSpec {
    SwitchingKind kind = SwitchingKind::Gaussian;
    double timescale = 1.0; // T > 0
    double center = 0.0;
    std::vector<std::pair<double, double>> samples; // Tabulated only: (tau, value)

    SwitchingSpec() = default;
    SwitchingSpec(SwitchingKind k, double T, double c = 0.0);
    static SwitchingSpec tabulated(std::vector<std::pair<double, double>> samples);

    void validate() const; // throws std::invalid_argument

    // True if chi is differentiable everywhere (CompactCosine has corners at
    // the support edges and is not).
    bool smooth() const { return kind != SwitchingKind::CompactCosine; }

    // Default evaluation grid per kind: [-8T,8T]x3201 (Gaussian/Tabulated span),
    // [-T,T]x4001 (compact kinds), centre-shifted.
    std::vector<double> default_grid() const;

    // Half-width of the (numerically effective) support around the centre.
    double support_radius() const;
};

double eval_switching(const SwitchingSpec& spec, double tau);

// d chi / d tau (piecewise slope for Tabulated).
double eval_switching_derivative(const SwitchingSpec& spec, double tau);

// f_Omega(tau) = int_{-inf}^{tau} chi(x) e^{-i Omega x} dx.
// Closed forms for the analytic kinds (complex error function for the
// Gaussian, exact trigonometric primitives for the compact kinds); adaptive
// oscillation-aware quadrature for Tabulated. Omega >= 0 required.
cd lower_incomplete_fourier(const SwitchingSpec& spec, double omega, double tau);

// Full transform chihat(omega) = int chi(x) e^{-i omega x} dx = f_omega(+inf).
cd fourier_transform(const SwitchingSpec& spec, double omega);

// Dual switching: chi~(tau) = |f_Omega(tau)| and theta(tau) = -arg f_Omega(tau)
// unwrapped to a continuous branch (so that chi~ e^{-i theta} = f_Omega).
struct DualSwitching {
    double gap = 0.0;                  // Omega
    std::vector<double> grid;          // strictly increasing tau values
    std::vector<double> chi_tilde;     // |f_Omega| on the grid (units of time)
    std::vector<double> theta;         // continuous phase (radians)
    double boundary_value = 0.0;       // chi_tilde at the last grid point
    SwitchingSpec base;                // generating switching

    // dtheta/dtau by central differences (the effective time-dependent gap).
    std::vector<double> gap_profile() const;
};

DualSwitching dual_switching(const SwitchingSpec& spec, double omega,
                             const std::vector<double>& grid);

// sup over the grid of |Omega f_Omega(tau) - i chi(tau) e^{-i Omega tau}|,
// the quantity whose large-gap limit vanishes for integrable differentiable
// switchings. CompactCosine is accepted but converges slowly (corner at the
// support edge); see SwitchingSpec::smooth().
double large_gap_residual(const SwitchingSpec& spec, double omega,
                          const std::vector<double>& grid);

// Trapezoidal relative L1 distance: int |f-g| / int |g| on the given grid.
double l1_relative_distance(const std::vector<double>& f_samples,
                            const std::vector<double>& g_samples,
                            const std::vector<double>& grid);

// Signed relative area difference: int (f-g) / int g on the given grid
// (the normalisation-difference metric behind the headline convergence
// percentages; distinct from the absolute L1 distance above).
double relative_area_difference(const std::vector<double>& f_samples,
                                const std::vector<double>& g_samples,
                                const std::vector<double>& grid);

struct PhaseFit {
    double residual = 0.0; // sup |theta - (Omega tau + c)| over the support region
    double constant = 0.0; // best-fit c (minimax)
};

// Fit theta ~ Omega tau + c over the region where chi~ > 1e-6 max(chi~).
PhaseFit phase_linearity_residual(const DualSwitching& dual);

// Distance of c to the nearest +-pi/2 (mod 2 pi); helper for phase checks.
double phase_constant_offset(double c);

} // namespace udw
