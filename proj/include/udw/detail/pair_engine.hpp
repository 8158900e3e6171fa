#pragma once

// Internal engine for the second-order detector integrals
//   I = II dt dt' K_A(t) K_B(t') G(t - t')
// in rotated coordinates u = t - t', v = t + t' (Jacobian 1/2):
//   I = Int du P(u) G(u),   P(u) = (1/2) Int dv K_A((v+u)/2) K_B((v-u)/2).
//
// Gaussian-kind legs admit a closed complex-Gaussian inner form valid at
// complex u, which enables (a) exact extraction of e^{-Omega^2 T^2}-small
// prefactors and (b) contour-shifted outer integration u -> u - i s for
// oscillatory kernels (all field-kernel poles lie in Im u > 0, so a downward
// shift is exact by Cauchy's theorem). Compact/tabulated legs use adaptive
// inner quadrature on the real axis.
//
// Not part of the public API.

#include <complex>
#include <functional>
#include <vector>

#include "udw/field.hpp"
#include "udw/switching.hpp"

namespace udw::detail {

using cd = std::complex<double>;

struct Leg {
    // analytic: coeff * (alpha + beta t) * exp(-(t-mu)^2/(2 sg^2)) * e^{i nu t}
    bool analytic = false;
    cd coeff = 1.0;
    cd alpha = 1.0, beta = 0.0;
    double mu = 0.0, sg = 1.0, nu = 0.0;

    // generic: callable on real t, supported on [lo, hi], kinks inside
    std::function<cd(double)> fn;
    double lo = 0.0, hi = 0.0;
    std::vector<double> kinks;
    double osc = 0.0; // oscillation rate of fn (rad per unit time), for panels

    cd value(double t) const;
    double support_lo() const;
    double support_hi() const;
};

// Leg builders. "nu" phases: value(t) carries e^{i nu t}.
Leg switching_leg(const SwitchingSpec& spec, double nu, cd coeff = 1.0);
// d/dt [ spec(t) e^{i nu t} ] * coeff  (for integrated-by-parts kernels)
Leg switching_derivative_leg(const SwitchingSpec& spec, double nu, cd coeff = 1.0);
// conj(f_Omega(t)) e^{i nu t} — the exact-dual kernel chi~ e^{+i theta}
// (or its conjugate via conjugate=true giving chi~ e^{-i theta} = f_Omega).
Leg dual_leg(const DualSwitching& dual, double nu, bool conjugate, cd coeff = 1.0);

// Field kernel G(u) evaluated at complex u (s = u - i eps applied internally).
struct OuterKernel {
    std::function<cd(cd)> eval;
    std::vector<double> singular; // real-axis pre-splits (lightcones etc.)
    double osc = 0.0;             // fastest oscillation of G along real u
    bool complex_ok = true;       // false: must stay on the real axis
};

OuterKernel wightman_kernel(const FieldModel& f, double eps, double d, double smear_a);
OuterKernel wightman_dd_kernel(const FieldModel& f, double eps, double d, double smear_a);

// Inner integral P(u); complex u requires both legs analytic.
cd inner_product(const Leg& a, const Leg& b, cd u);

struct PairOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;     // additional absolute floor for the outer integral
    int max_segments = 20000;
};

// Full-line outer integral Int du P(u) G(u); contour_shift > 0 evaluates on
// u - i s (requires analytic legs and kernel.complex_ok).
cd pair_full_line(const Leg& a, const Leg& b, const OuterKernel& g,
                  double contour_shift, const PairOptions& opt = {});

// Time-ordered outer: Int_0^inf du P(u) G(|u|) + Int_{-inf}^0 du P(u) G(|u|)
// with independent adaptive rules per triangle (real axis only).
cd pair_time_ordered(const Leg& a, const Leg& b, const OuterKernel& g,
                     const PairOptions& opt = {});

// Optimal downward contour shift for oscillation rate kappa (rad/time) given
// the legs' Gaussian envelopes; 0 when shifting is pointless or not allowed.
double choose_contour_shift(const Leg& a, const Leg& b, double kappa);

// Nested evaluation in (t, t') order (independent cross-check route):
//   Int dt K_A(t) [ Int_{t'<t} K_B W_>(t-t') + Int_{t'>t} K_B W_<(t-t') ]
// time_ordered=false uses the same kernel for both half-planes (plain W).
cd pair_nested(const Leg& a, const Leg& b, const OuterKernel& g,
               bool time_ordered, const PairOptions& opt = {});

// ---- frequency-domain route -------------------------------------------------

// sum/integral of rho(w) w^wpow e^{-smear_a w^2} FA(w) conj(FB(w)) dw.
// FA/FB are the legs' Fourier transforms evaluated at the physical frequency
// combination (caller bakes the gap shifts in).
cd spectral_pair(const SpectralWeight& sw, int wpow, double smear_a,
                 const std::function<cd(double)>& FA,
                 const std::function<cd(double)>& FB,
                 double T_scale, double rel_tol = 1e-10);

// Exact-dual transforms G(w) = Int f_Omega(t) e^{-i w t} dt (adiabatic value):
// finite-box quadrature plus analytic constant tail, and the closed form
// chihat(Omega + w)/(i w). The two give independent routes for dual inputs.
cd dual_transform_quadrature(const DualSwitching& dual, double w);
cd dual_transform_closed(const DualSwitching& dual, double w);

// Decay power p of |chihat(w)| ~ 1/w^p for a switching kind (99 = faster than
// any power); used for UV-divergence detection in derivative-coupled spectra.
int transform_tail_power(const SwitchingSpec& s);

} // namespace udw::detail
