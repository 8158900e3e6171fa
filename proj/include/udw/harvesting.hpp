#pragma once

#include <array>
#include <complex>

#include "udw/detector.hpp"
#include "udw/field.hpp"

namespace udw {

enum class DetectorId { A, B };

// Two detectors coupled to the same field. Switchings may carry independent
// centres (a time delay between the interactions); spatial smearings must not
// overlap (pointlike detectors need distinct positions).
struct DetectorPair {
    DetectorConfig a, b;
    void validate(const FieldModel& field) const;
};

struct HarvestResult {
    double l_aa = 0.0, l_bb = 0.0;
    cd l_ab{};
    cd m{};
    double v_score = 0.0;
    double negativity = 0.0;
    // basis |gg>, |g e_B>, |e_A g>, |e_A e_B>, row-major
    std::array<cd, 16> rho_4x4{};
};

// L_ij matrix element: detector i at the unprimed event, j at the primed.
// i == j reduces to the single-detector excitation probability; L_AB is the
// conjugate of L_BA.
cd lij(const DetectorPair& pair, DetectorId i, DetectorId j, const FieldModel& field,
       const EngineOptions& opt = {});

// Non-local amplitude term
//   M = -lam_A lam_B II e^{i(Om_A t + Om_B t')} chi_A chi_B G_F dt dt'
// with the time-ordered kernel split along the diagonal.
cd m_term(const DetectorPair& pair, const FieldModel& field, const EngineOptions& opt = {});

// Derivative-coupled M~, evaluated two ways: directly with the time-ordered
// W~ kernel, and in the integrated-by-parts form against G_F. The two must
// agree up to the equal-time commutator remnant (zero for microcausal fields;
// a truncated-mode cavity has a computable nonzero remnant at generic
// positions). Disagreement beyond tolerance raises cross_validation_error
// carrying both values and the remnant estimate.
struct MDerivative {
    cd direct{};
    cd by_parts{};
    double remnant_estimate = 0.0;
};
MDerivative m_term_derivative_full(const DetectorPair& pair, const FieldModel& field,
                                   const EngineOptions& opt = {});
cd m_term_derivative(const DetectorPair& pair, const FieldModel& field,
                     const EngineOptions& opt = {});

// V = sqrt(|M|^2 + ((L_AA - L_BB)/2)^2) - (L_AA + L_BB)/2; N = max(0, V).
struct NegativityResult {
    double v_score = 0.0;
    double negativity = 0.0;
};
NegativityResult negativity(double l_aa, double l_bb, cd m);

HarvestResult harvest(const DetectorPair& pair, const FieldModel& field, CouplingKind kind,
                      const EngineOptions& opt = {});

// Relative differences between the amplitude-coupled pair and its constant-gap
// derivative twin (chi~_j = chi_j / Omega_j via the coupling rescale).
struct PairDualityResidual {
    double dl_aa = 0.0;
    double dl_bb = 0.0;
    double dm = 0.0;          // relative difference of |M|
    double dnegativity = 0.0; // 0 when both negativities vanish
};
PairDualityResidual pair_duality_residual(const DetectorPair& amplitude_pair,
                                          const FieldModel& field,
                                          const EngineOptions& opt = {});

// True when the two interactions are spacelike separated with margin: temporal
// supports (Gaussians truncated at 6 sigma) plus light travel time disjoint.
bool spacelike_certified(const DetectorPair& pair, double* margin = nullptr);

} // namespace udw
