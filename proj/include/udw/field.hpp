#pragma once

#include <array>
#include <complex>
#include <variant>
#include <vector>

namespace udw {

using cd = std::complex<double>;

// A spacetime point in the detector frame; units of time (c = 1). The cavity
// background is 1+1 dimensional and uses x[0] as its spatial coordinate.
struct Event {
    double t = 0.0;
    std::array<double, 3> x{0.0, 0.0, 0.0};
};

// Massless Minkowski vacuum in 3+1 with the i-epsilon prescription
//   W(x,x') = -1/(4 pi^2) * 1/((dt - i eps)^2 - |dx|^2).
// mass is carried for forward compatibility and must be 0.
struct MinkowskiVacuum {
    double mass = 0.0;
    double epsilon = 1e-3; // regulator, units of time; > 0
};

// Dirichlet cavity on (0, length) with mode_count stationary modes
//   u_k(t,x) = sin(k pi x / L) e^{-i w_k t} / sqrt(w_k L),  w_k = k pi / L.
// Finite sums give machine-precision ground truth for cross-validation.
struct FiniteModeCavity {
    double length = 1.0;
    int mode_count = 1;
};

struct FieldModel {
    std::variant<MinkowskiVacuum, FiniteModeCavity> model;

    FieldModel() = default;
    FieldModel(MinkowskiVacuum m) : model(m) { validate(); }
    FieldModel(FiniteModeCavity c) : model(c) { validate(); }
    void validate() const;

    bool is_minkowski() const { return std::holds_alternative<MinkowskiVacuum>(model); }
    const MinkowskiVacuum& minkowski() const { return std::get<MinkowskiVacuum>(model); }
    const FiniteModeCavity& cavity() const { return std::get<FiniteModeCavity>(model); }

    // Copy with a different regulator (Minkowski only).
    FieldModel with_epsilon(double eps) const;
};

cd wightman(const FieldModel& field, const Event& a, const Event& b);

// W~(x,x') = d/dtau d/dtau' W (static detectors: tau = t on both legs).
cd wightman_dtau(const FieldModel& field, const Event& a, const Event& b);

// Feynman propagator: theta(t-t') W(x,x') + theta(t'-t) W(x',x).
cd feynman(const FieldModel& field, const Event& a, const Event& b);

// Spectral description of W between two static spatial points:
//   W(dt) = int_0^inf rho(w) e^{-i w dt} dw   (continuum), or
//   W(dt) = sum_k weight_k e^{-i w_k dt}      (cavity atoms).
// Minkowski massless: rho(w, d) = sin(w d)/(4 pi^2 d), -> w/(4 pi^2) as d -> 0.
struct SpectralWeight {
    bool atomic = false;
    double separation = 0.0;                       // d (continuum)
    std::vector<std::pair<double, double>> atoms;  // (w_k, weight_k)

    double density(double omega) const; // continuum only
};

SpectralWeight spectral_weight(const FieldModel& field, const Event& a, const Event& b);

// Closed-form kernels as functions of complex time separation s = dt - i eps
// (exposed for the detector integrators, which evaluate them on shifted
// contours; all poles lie in the upper half of the s plane).
namespace kernels {

// pointlike Minkowski W, W~:
cd mink_w(cd s, double d);
cd mink_wdd(cd s, double d);
// Gaussian-smeared Minkowski (a = (sigma_A^2 + sigma_B^2)/2 > 0):
cd mink_w_smeared(cd s, double d, double a);
cd mink_wdd_smeared(cd s, double d, double a);
// cavity mode data:
double cavity_mode_freq(const FiniteModeCavity& c, int k);     // k = 1..K
double cavity_mode_amp(const FiniteModeCavity& c, int k, double x); // v_k(x)
cd cavity_w(const FiniteModeCavity& c, cd s, double xa, double xb);
cd cavity_wdd(const FiniteModeCavity& c, cd s, double xa, double xb);

} // namespace kernels

} // namespace udw
