#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "udw/field.hpp"
#include "udw/switching.hpp"

namespace udw {

enum class CouplingKind { Amplitude, Derivative };

struct Pointlike {};
struct GaussianBall {
    double width = 0.1; // sigma > 0; profile e^{-|x|^2/2 sigma^2}/(2 pi sigma^2)^{3/2}
};
using Smearing = std::variant<Pointlike, GaussianBall>;

// A static inertial two-level detector. For Derivative coupling the switching
// may be either an exact DualSwitching (time-dependent gap through its phase)
// or a plain SwitchingSpec taken as chi~ with the constant gap Omega
// (theta = Omega tau - pi/2); the chi/Omega rescale is the caller's business,
// conventionally folded into `coupling`.
struct DetectorConfig {
    double gap = 1.0;        // Omega > 0
    double coupling = 1.0;   // lambda (dimensionless in 3+1)
    std::variant<SwitchingSpec, DualSwitching> switching;
    Smearing smearing = Pointlike{};
    std::array<double, 3> position{0.0, 0.0, 0.0};
    CouplingKind coupling_kind = CouplingKind::Amplitude;

    void validate(const FieldModel& field) const;
    bool has_dual() const { return std::holds_alternative<DualSwitching>(switching); }
    const SwitchingSpec& spec() const { return std::get<SwitchingSpec>(switching); }
    const DualSwitching& dual() const { return std::get<DualSwitching>(switching); }
    double smear_sq() const; // sigma^2 (0 for pointlike)
    double timescale() const;
};

struct DetectorState {
    double p_excited = 0.0;
    // rows/cols ordered (ground, excited); off-diagonals vanish at this order
    std::array<std::array<double, 2>, 2> matrix{{{1.0, 0.0}, {0.0, 0.0}}};
};

struct EngineOptions {
    double route_target = 1e-6;   // expected two-route agreement
    double route_failure = 1e-4;  // throw cross_validation_error beyond this
    bool cross_validate = true;
    // epsilon schedules (units of the switching timescale)
    std::vector<double> eps_w{1e-2, 1e-3, 1e-4};
    std::vector<double> eps_wdd{3e-2, 1e-2, 3e-3, 1e-3};
    double warn_probability = 0.1;
    std::function<void(const std::string&)> warn; // default: stderr
};

struct RouteDiagnostics {
    double spectral = 0.0;
    double time_domain = 0.0;
    double rel_difference = 0.0;
};

// Leading-order excitation probability of an amplitude-coupled detector,
// computed by two independent routes that must agree:
//  (a) the time-domain double integral (contour-shifted / eps-extrapolated),
//  (b) the one-dimensional spectral integral over the field's weight.
double excitation_probability(const DetectorConfig& det, const FieldModel& field,
                              const EngineOptions& opt = {},
                              RouteDiagnostics* diag = nullptr);

// Same for a derivative-coupled detector (W~ kernel; spectral weight carries
// an extra w^2). Exact DualSwitching inputs use the adiabatic prescription
// (finite box + analytic constant-tail term).
double excitation_probability_derivative(const DetectorConfig& det, const FieldModel& field,
                                         const EngineOptions& opt = {},
                                         RouteDiagnostics* diag = nullptr);

DetectorState final_state(double p);

// |L - L~| / L between the amplitude detector (chi, Omega) and the constant-gap
// derivative detector with chi~ = chi/Omega (realised as coupling/Omega).
double coupling_duality_residual(const SwitchingSpec& spec, double omega,
                                 const FieldModel& field,
                                 const std::array<double, 3>& position = {0, 0, 0},
                                 const EngineOptions& opt = {});

} // namespace udw
