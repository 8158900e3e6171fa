#include "udw/harvesting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "udw/detail/pair_engine.hpp"
#include "udw/errors.hpp"
#include "udw/quadrature.hpp"

namespace udw {
namespace {

using detail::Leg;
using detail::OuterKernel;

constexpr double kPi = std::numbers::pi;

double separation(const DetectorPair& p) {
    const double dx = p.a.position[0] - p.b.position[0];
    const double dy = p.a.position[1] - p.b.position[1];
    const double dz = p.a.position[2] - p.b.position[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double sigma_of(const DetectorConfig& d) {
    return std::holds_alternative<GaussianBall>(d.smearing)
               ? std::get<GaussianBall>(d.smearing).width
               : 0.0;
}

const DetectorConfig& det_of(const DetectorPair& p, DetectorId id) {
    return id == DetectorId::A ? p.a : p.b;
}

// Time-domain legs of the L_ij kernel: K_i(t) = chi_i(t) e^{-i Om_i t},
// K_j(t') = chi_j(t') e^{+i Om_j t'}; derivative coupling swaps in the
// appropriate kernels (constant-gap phases e^{-i(Om t - pi/2)} cancel between
// the two legs, so plain chi~ e^{-+i Om t} legs are exact for L~).
Leg amp_leg(const DetectorConfig& d, double sign) {
    return detail::switching_leg(d.spec(), sign * d.gap);
}

struct SpectralSide {
    std::function<cd(double)> F; // transform at field frequency w
};

SpectralSide amp_side(const DetectorConfig& d) {
    const SwitchingSpec spec = d.spec();
    const double gap = d.gap;
    return {[spec, gap](double w) { return fourier_transform(spec, gap + w); }};
}

SpectralSide dual_side_closed(const DetectorConfig& d) {
    const DualSwitching dual = d.dual();
    return {[dual](double w) { return detail::dual_transform_closed(dual, w); }};
}

SpectralSide dual_side_quadrature(const DetectorConfig& d) {
    const DualSwitching dual = d.dual();
    return {[dual](double w) { return detail::dual_transform_quadrature(dual, w); }};
}

double min_timescale(const DetectorPair& p) {
    return std::min(p.a.timescale(), p.b.timescale());
}

// eps schedule in absolute units; cavity kernels ignore eps -> single pass.
std::vector<double> schedule(const FieldModel& f, const std::vector<double>& factors,
                             double T) {
    if (!f.is_minkowski()) return {0.0};
    std::vector<double> out;
    for (double x : factors) out.push_back(x * T);
    return out;
}

cd extrapolate(const std::vector<double>& eps, const std::vector<cd>& vals) {
    if (vals.size() == 1) return vals[0];
    return quad::neville_zero(eps, vals);
}

OuterKernel make_kernel(const FieldModel& field, int wpow, double eps, double d,
                        double smear_a, double xa, double xb) {
    if (field.is_minkowski())
        return wpow == 2 ? detail::wightman_dd_kernel(field, eps, d, smear_a)
                         : detail::wightman_kernel(field, eps, d, smear_a);
    OuterKernel g;
    const FiniteModeCavity c = field.cavity();
    if (wpow == 2)
        g.eval = [c, xa, xb](cd u) { return kernels::cavity_wdd(c, u, xa, xb); };
    else
        g.eval = [c, xa, xb](cd u) { return kernels::cavity_w(c, u, xa, xb); };
    g.osc = kernels::cavity_mode_freq(c, c.mode_count);
    return g;
}

} // namespace

void DetectorPair::validate(const FieldModel& field) const {
    a.validate(field);
    b.validate(field);
    const double d = separation(*this);
    const double sa = sigma_of(a), sb = sigma_of(b);
    if (sa > 0.0 || sb > 0.0) {
        if (!(d > 5.0 * (sa + sb)))
            throw std::invalid_argument(
                "smeared detectors must be separated by more than 5(sigma_A + sigma_B)");
    } else if (!(d > 0.0)) {
        throw std::invalid_argument("pointlike detectors need distinct positions");
    }
    if (a.has_dual() != b.has_dual())
        throw std::invalid_argument("mixed dual/plain switchings in a pair are not supported");
}

cd lij(const DetectorPair& pair, DetectorId i, DetectorId j, const FieldModel& field,
       const EngineOptions& opt) {
    pair.validate(field);
    const DetectorConfig& di = det_of(pair, i);
    const DetectorConfig& dj = det_of(pair, j);
    const bool derivative = di.coupling_kind == CouplingKind::Derivative;
    if (derivative != (dj.coupling_kind == CouplingKind::Derivative))
        throw std::invalid_argument("lij: mixed coupling kinds");
    const int wpow = derivative ? 2 : 0;
    const double d = i == j ? 0.0 : separation(pair);
    const double smear_a = 0.5 * (sigma_of(di) * sigma_of(di) + sigma_of(dj) * sigma_of(dj));
    const double T = min_timescale(pair);
    const double lam = di.coupling * dj.coupling;
    const Event ei{0.0, di.position}, ej{0.0, dj.position};
    const SpectralWeight sw = spectral_weight(field, ei, ej);

    cd spectral, timedom;
    if (di.has_dual()) {
        // exact duals: factorised transforms, quadrature vs closed form
        auto Fi_c = dual_side_closed(di).F, Fj_c = dual_side_closed(dj).F;
        auto Fi_q = dual_side_quadrature(di).F, Fj_q = dual_side_quadrature(dj).F;
        if (!derivative) throw std::invalid_argument("dual switchings imply derivative coupling");
        spectral = detail::spectral_pair(sw, 2, smear_a, Fi_c, Fj_c, T);
        timedom = detail::spectral_pair(sw, 2, smear_a, Fi_q, Fj_q, T);
    } else {
        const SwitchingSpec& si = di.spec();
        const SwitchingSpec& sj = dj.spec();
        if (wpow == 2 && field.is_minkowski() && smear_a == 0.0 && d == 0.0 &&
            detail::transform_tail_power(si) + detail::transform_tail_power(sj) <= 4)
            throw divergence_error(
                "derivative-coupled response diverges (UV) for non-smooth switchings "
                "with pointlike detectors on the Minkowski vacuum",
                std::numeric_limits<double>::infinity());
        Leg legA = detail::switching_leg(si, -di.gap);
        Leg legB = detail::switching_leg(sj, +dj.gap);
        auto Fi = amp_side(di).F, Fj = amp_side(dj).F;
        spectral = detail::spectral_pair(sw, wpow, smear_a, Fi, Fj, T);
        const double kappa = 0.5 * (di.gap + dj.gap);
        const double shift = detail::choose_contour_shift(legA, legB, kappa);
        if (shift > 0.5 * T && legA.analytic && legB.analytic) {
            timedom = detail::pair_full_line(
                legA, legB, make_kernel(field, wpow, 0.0, d, smear_a,
                                        di.position[0], dj.position[0]), shift);
        } else {
            const auto eps = schedule(field, wpow == 2 ? opt.eps_wdd : opt.eps_w, T);
            std::vector<cd> vals;
            for (double e : eps)
                vals.push_back(detail::pair_full_line(
                    legA, legB, make_kernel(field, wpow, e, d, smear_a,
                                            di.position[0], dj.position[0]), 0.0));
            timedom = extrapolate(eps, vals);
        }
    }
    const double scale = std::max(std::abs(spectral), std::abs(timedom));
    if (opt.cross_validate && scale > 0.0 &&
        std::abs(spectral - timedom) / scale > opt.route_failure)
        throw cross_validation_error("lij routes disagree", spectral, timedom);
    return lam * spectral;
}

namespace {

// Shared machinery for the M-type integrals. Builds the legs for the requested
// form and evaluates triangle + nested routes with eps extrapolation.
struct MLegs {
    Leg a, b;
};

MLegs m_legs_amplitude(const DetectorPair& p) {
    return {detail::switching_leg(p.a.spec(), +p.a.gap),
            detail::switching_leg(p.b.spec(), +p.b.gap)};
}

// Q_j = chi~_j e^{+i theta_j}, theta_j = Om_j t - pi/2  =>  -i chi~_j e^{+i Om_j t}
MLegs m_legs_derivative_direct(const DetectorPair& p) {
    if (p.a.has_dual())
        return {detail::dual_leg(p.a.dual(), 0.0, /*conjugate=*/true),
                detail::dual_leg(p.b.dual(), 0.0, /*conjugate=*/true)};
    return {detail::switching_leg(p.a.spec(), +p.a.gap, cd(0.0, -1.0)),
            detail::switching_leg(p.b.spec(), +p.b.gap, cd(0.0, -1.0))};
}

// d/dt Q_j for the integrated-by-parts form. For exact duals d/dt(f*) =
// chi e^{+i Om t} exactly; constant-gap: -i d/dt(chi~ e^{i Om t}).
MLegs m_legs_derivative_by_parts(const DetectorPair& p) {
    if (p.a.has_dual())
        return {detail::switching_leg(p.a.dual().base, +p.a.dual().gap),
                detail::switching_leg(p.b.dual().base, +p.b.dual().gap)};
    return {detail::switching_derivative_leg(p.a.spec(), +p.a.gap, cd(0.0, -1.0)),
            detail::switching_derivative_leg(p.b.spec(), +p.b.gap, cd(0.0, -1.0))};
}

cd m_eval(const DetectorPair& pair, const FieldModel& field, const MLegs& legs, int wpow,
          const EngineOptions& opt, bool nested_route, double* route_diff) {
    const double d = separation(pair);
    const double smear_a =
        0.5 * (sigma_of(pair.a) * sigma_of(pair.a) + sigma_of(pair.b) * sigma_of(pair.b));
    const double T = min_timescale(pair);
    const auto eps = schedule(field, wpow == 2 ? opt.eps_wdd : opt.eps_w, T);

    std::vector<cd> tri, nest;
    for (double e : eps) {
        OuterKernel g = make_kernel(field, wpow, e, d, smear_a, pair.a.position[0],
                                    pair.b.position[0]);
        tri.push_back(detail::pair_time_ordered(legs.a, legs.b, g));
        if (nested_route)
            nest.push_back(detail::pair_nested(legs.a, legs.b, g, /*time_ordered=*/true));
    }
    const cd v_tri = extrapolate(eps, tri);
    if (nested_route) {
        const cd v_nest = extrapolate(eps, nest);
        const double scale = std::max(std::abs(v_tri), std::abs(v_nest));
        const double rel = scale > 0.0 ? std::abs(v_tri - v_nest) / scale : 0.0;
        if (route_diff) *route_diff = rel;
        if (opt.cross_validate && rel > opt.route_failure)
            throw cross_validation_error("time-ordered integral routes disagree", v_tri,
                                         v_nest);
    }
    return -v_tri;
}

// Equal-time commutator remnant estimate: |kappa_c| * |Int Q_A Q_B dt|, where
// kappa_c = 2 W'(0) (zero for microcausal fields; truncated Dirichlet sum for
// the finite-mode cavity).
double remnant_estimate(const DetectorPair& pair, const FieldModel& field,
                        const MLegs& legs) {
    cd kappa_c;
    if (field.is_minkowski()) {
        // extrapolated 2 W'(0) at separation d: O(eps) -> 0
        const double d = separation(pair);
        std::vector<double> xs;
        std::vector<cd> ys;
        for (double ef : {1e-2, 1e-3, 1e-4}) {
            const double e = ef * min_timescale(pair);
            const cd s(0.0, -e);
            const cd den = s * s - d * d;
            ys.push_back(2.0 * s / (2.0 * kPi * kPi * den * den)); // 2 W'(0)
            xs.push_back(e);
        }
        kappa_c = quad::neville_zero(xs, ys);
    } else {
        const auto& c = field.cavity();
        cd sum = 0.0;
        for (int k = 1; k <= c.mode_count; ++k)
            sum += kernels::cavity_mode_amp(c, k, pair.a.position[0]) *
                   kernels::cavity_mode_amp(c, k, pair.b.position[0]) *
                   kernels::cavity_mode_freq(c, k);
        kappa_c = cd(0.0, -2.0) * sum;
    }
    quad::Options q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-300;
    const double lo = std::max(legs.a.support_lo(), legs.b.support_lo());
    const double hi = std::min(legs.a.support_hi(), legs.b.support_hi());
    if (hi <= lo) return 0.0;
    auto f = [&](double t) { return legs.a.value(t) * legs.b.value(t); };
    const cd qq = quad::integrate_noexcept(f, lo, hi, q).value;
    return std::abs(kappa_c) * std::abs(qq);
}

} // namespace

cd m_term(const DetectorPair& pair, const FieldModel& field, const EngineOptions& opt) {
    pair.validate(field);
    if (pair.a.coupling_kind != CouplingKind::Amplitude ||
        pair.b.coupling_kind != CouplingKind::Amplitude)
        throw std::invalid_argument("m_term expects amplitude couplings");
    const double lam = pair.a.coupling * pair.b.coupling;
    if (lam == 0.0) return 0.0;
    double rd = 0.0;
    const cd v = m_eval(pair, field, m_legs_amplitude(pair), 0, opt,
                        /*nested_route=*/opt.cross_validate, &rd);
    return lam * v;
}

MDerivative m_term_derivative_full(const DetectorPair& pair, const FieldModel& field,
                                   const EngineOptions& opt) {
    pair.validate(field);
    if (pair.a.coupling_kind != CouplingKind::Derivative ||
        pair.b.coupling_kind != CouplingKind::Derivative)
        throw std::invalid_argument("m_term_derivative expects derivative couplings");
    MDerivative out;
    const double lam = pair.a.coupling * pair.b.coupling;
    if (lam == 0.0) return out;

    const MLegs direct = m_legs_derivative_direct(pair);
    const MLegs parts = m_legs_derivative_by_parts(pair);
    out.direct = lam * m_eval(pair, field, direct, 2, opt, false, nullptr);
    out.by_parts = lam * m_eval(pair, field, parts, 0, opt, false, nullptr);
    out.remnant_estimate = std::abs(lam) * remnant_estimate(pair, field, direct);

    const double scale = std::max(std::abs(out.direct), std::abs(out.by_parts));
    const double tol = field.is_minkowski() ? 1e-4 : 1e-6;
    if (opt.cross_validate && scale > 0.0 &&
        std::abs(out.direct - out.by_parts) > tol * scale + 10.0 * out.remnant_estimate)
        throw cross_validation_error(
            "derivative M forms disagree beyond the commutator remnant", out.direct,
            out.by_parts, out.remnant_estimate);
    return out;
}

cd m_term_derivative(const DetectorPair& pair, const FieldModel& field,
                     const EngineOptions& opt) {
    return m_term_derivative_full(pair, field, opt).direct;
}

NegativityResult negativity(double l_aa, double l_bb, cd m) {
    if (l_aa < 0.0 || l_bb < 0.0)
        throw std::invalid_argument("negativity: populations must be nonnegative");
    NegativityResult r;
    const double half_diff = 0.5 * (l_aa - l_bb);
    r.v_score = std::sqrt(std::norm(m) + half_diff * half_diff) - 0.5 * (l_aa + l_bb);
    r.negativity = std::max(0.0, r.v_score);
    return r;
}

HarvestResult harvest(const DetectorPair& pair, const FieldModel& field, CouplingKind kind,
                      const EngineOptions& opt) {
    pair.validate(field);
    DetectorPair p = pair;
    p.a.coupling_kind = kind;
    p.b.coupling_kind = kind;

    HarvestResult res;
    if (p.a.coupling == 0.0 && p.b.coupling == 0.0) {
        res.rho_4x4[0] = 1.0;
        return res;
    }
    const cd laa = lij(p, DetectorId::A, DetectorId::A, field, opt);
    const cd lbb = lij(p, DetectorId::B, DetectorId::B, field, opt);
    const cd lab = lij(p, DetectorId::A, DetectorId::B, field, opt);
    res.l_aa = laa.real();
    res.l_bb = lbb.real();
    res.l_ab = lab;
    res.m = kind == CouplingKind::Amplitude ? m_term(p, field, opt)
                                            : m_term_derivative(p, field, opt);
    const NegativityResult n = negativity(res.l_aa, res.l_bb, res.m);
    res.v_score = n.v_score;
    res.negativity = n.negativity;

    auto at = [&res](int r, int c) -> cd& { return res.rho_4x4[4 * r + c]; };
    at(0, 0) = 1.0 - res.l_aa - res.l_bb;
    at(1, 1) = res.l_bb;
    at(2, 2) = res.l_aa;
    at(1, 2) = std::conj(res.l_ab); // L_BA
    at(2, 1) = res.l_ab;
    at(3, 0) = res.m;
    at(0, 3) = std::conj(res.m);
    return res;
}

PairDualityResidual pair_duality_residual(const DetectorPair& amplitude_pair,
                                          const FieldModel& field,
                                          const EngineOptions& opt) {
    DetectorPair amp = amplitude_pair;
    amp.a.coupling_kind = CouplingKind::Amplitude;
    amp.b.coupling_kind = CouplingKind::Amplitude;
    DetectorPair der = amp;
    der.a.coupling_kind = CouplingKind::Derivative;
    der.b.coupling_kind = CouplingKind::Derivative;
    der.a.coupling /= der.a.gap; // chi~ = chi/Omega
    der.b.coupling /= der.b.gap;

    const HarvestResult ha = harvest(amp, field, CouplingKind::Amplitude, opt);
    const HarvestResult hd = harvest(der, field, CouplingKind::Derivative, opt);

    auto rel = [](double x, double y) {
        const double s = std::abs(x);
        return s > 0.0 ? std::abs(x - y) / s : std::abs(y);
    };
    PairDualityResidual r;
    r.dl_aa = rel(ha.l_aa, hd.l_aa);
    r.dl_bb = rel(ha.l_bb, hd.l_bb);
    r.dm = rel(std::abs(ha.m), std::abs(hd.m));
    if (ha.negativity <= 0.0 && hd.negativity <= 0.0) r.dnegativity = 0.0;
    else r.dnegativity = rel(ha.negativity, hd.negativity);
    return r;
}

bool spacelike_certified(const DetectorPair& pair, double* margin) {
    auto half_support = [](const DetectorConfig& d) {
        const SwitchingSpec& s = d.has_dual() ? d.dual().base : d.spec();
        // Gaussians truncated at 6 sigma for causal bookkeeping; compact kinds exact
        return s.kind == SwitchingKind::Gaussian ? 6.0 * s.timescale : s.support_radius();
    };
    auto center_of = [](const DetectorConfig& d) {
        return d.has_dual() ? d.dual().base.center : d.spec().center;
    };
    const double d = separation(pair);
    const double t_reach = std::abs(center_of(pair.a) - center_of(pair.b)) +
                           half_support(pair.a) + half_support(pair.b);
    const double m = d - t_reach;
    if (margin) *margin = m;
    return m > 0.0;
}

} // namespace udw
