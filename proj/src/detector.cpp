#include "udw/detector.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "udw/detail/pair_engine.hpp"
#include "udw/errors.hpp"
#include "udw/quadrature.hpp"

namespace udw::detail {
namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

int transform_tail_power(const SwitchingSpec& s) {
    switch (s.kind) {
        case SwitchingKind::Gaussian: return 99;      // super-polynomial decay
        case SwitchingKind::CompactCosine: return 2;  // corner in chi
        case SwitchingKind::CompactCosineSq: return 3; // corner in chi''
        case SwitchingKind::Tabulated: return 2;      // corners in chi'
    }
    return 2;
}

cd Leg::value(double t) const {
    if (analytic) {
        const double r = (t - mu) / sg;
        return coeff * (alpha + beta * t) * std::exp(-0.5 * r * r) * std::polar(1.0, nu * t);
    }
    return fn(t);
}

double Leg::support_lo() const { return analytic ? mu - 16.0 * sg : lo; }
double Leg::support_hi() const { return analytic ? mu + 16.0 * sg : hi; }

Leg switching_leg(const SwitchingSpec& spec, double nu, cd coeff) {
    Leg l;
    if (spec.kind == SwitchingKind::Gaussian) {
        l.analytic = true;
        l.coeff = coeff / std::sqrt(2.0 * kPi);
        l.alpha = 1.0;
        l.beta = 0.0;
        l.mu = spec.center;
        l.sg = spec.timescale;
        l.nu = nu;
        return l;
    }
    l.analytic = false;
    l.fn = [spec, nu, coeff](double t) {
        return coeff * eval_switching(spec, t) * std::polar(1.0, nu * t);
    };
    l.lo = spec.center - spec.support_radius();
    l.hi = spec.center + spec.support_radius();
    if (spec.kind == SwitchingKind::Tabulated) {
        l.lo = spec.samples.front().first;
        l.hi = spec.samples.back().first;
        for (const auto& [x, y] : spec.samples) l.kinks.push_back(x);
    }
    l.osc = std::abs(nu) + 2.0 * kPi / spec.timescale;
    return l;
}

Leg switching_derivative_leg(const SwitchingSpec& spec, double nu, cd coeff) {
    // d/dt [chi(t) e^{i nu t}] = (chi'(t) + i nu chi(t)) e^{i nu t}
    Leg l;
    if (spec.kind == SwitchingKind::Gaussian) {
        // chi' = -(t - c)/T^2 chi  ->  alpha + beta t with
        // alpha = i nu + c/T^2, beta = -1/T^2
        l.analytic = true;
        l.coeff = coeff / std::sqrt(2.0 * kPi);
        l.alpha = cd(spec.center / (spec.timescale * spec.timescale), nu);
        l.beta = -1.0 / (spec.timescale * spec.timescale);
        l.mu = spec.center;
        l.sg = spec.timescale;
        l.nu = nu;
        return l;
    }
    l.analytic = false;
    l.fn = [spec, nu, coeff](double t) {
        const cd v = eval_switching_derivative(spec, t) +
                     cd(0.0, nu) * eval_switching(spec, t);
        return coeff * v * std::polar(1.0, nu * t);
    };
    l.lo = spec.center - spec.support_radius();
    l.hi = spec.center + spec.support_radius();
    if (spec.kind == SwitchingKind::Tabulated) {
        l.lo = spec.samples.front().first;
        l.hi = spec.samples.back().first;
        for (const auto& [x, y] : spec.samples) l.kinks.push_back(x);
    }
    l.osc = std::abs(nu) + 2.0 * kPi / spec.timescale;
    return l;
}

Leg dual_leg(const DualSwitching& dual, double nu, bool conjugate, cd coeff) {
    Leg l;
    l.analytic = false;
    const SwitchingSpec base = dual.base;
    const double omega = dual.gap;
    l.fn = [base, omega, conjugate, nu, coeff](double t) {
        cd f = lower_incomplete_fourier(base, omega, t);
        if (conjugate) f = std::conj(f); // chi~ e^{+i theta}
        return coeff * f * std::polar(1.0, nu * t);
    };
    l.lo = base.center - base.support_radius();
    l.hi = base.center + base.support_radius();
    l.osc = std::abs(nu) + omega + 2.0 * kPi / base.timescale;
    return l;
}

namespace {

struct InnerParts {
    cd exponent;  // total exponent at the Gaussian saddle in v
    cd prefactor; // everything multiplying e^{exponent}
};

InnerParts inner_parts_analytic(const Leg& A, const Leg& B, cd u) {
    // t = (v+u)/2, t' = (v-u)/2. With q_j = 1/(2 sg_j^2) and
    // pA = u/2 - muA, pB = -u/2 - muB the combined exponent is
    //   E(v) = -a_v v^2 + b v + c,
    //   a_v = (qA + qB)/4
    //   b   = -(qA pA + qB pB) + i (nuA + nuB)/2
    //   c   = -qA pA^2 - qB pB^2 + i (nuA - nuB) u / 2
    // and Int (c0 + c1 v + c2 v^2) e^{E(v)} dv
    //   = sqrt(pi/a_v) e^{c + b^2/4a_v} [c0 + c1 r + c2 (r^2 + 1/(2 a_v))], r = b/(2 a_v).
    const double qA = 1.0 / (2.0 * A.sg * A.sg);
    const double qB = 1.0 / (2.0 * B.sg * B.sg);
    const cd pA = 0.5 * u - A.mu;
    const cd pB = -0.5 * u - B.mu;
    const double a_v = 0.25 * (qA + qB);
    const cd b = -(qA * pA + qB * pB) + cd(0.0, 0.5 * (A.nu + B.nu));
    const cd c = -qA * pA * pA - qB * pB * pB + cd(0.0, 0.5 * (A.nu - B.nu)) * u;
    const cd A0 = A.alpha + A.beta * (0.5 * u);
    const cd A1 = 0.5 * A.beta;
    const cd B0 = B.alpha - B.beta * (0.5 * u);
    const cd B1 = 0.5 * B.beta;
    const cd c0 = A0 * B0, c1 = A0 * B1 + A1 * B0, c2 = A1 * B1;
    const cd r = b / (2.0 * a_v);
    const cd bracket = c0 + c1 * r + c2 * (r * r + 1.0 / (2.0 * a_v));
    InnerParts parts;
    parts.exponent = c + b * b / (4.0 * a_v);
    parts.prefactor = 0.5 * A.coeff * B.coeff * std::sqrt(kPi / a_v) * bracket;
    return parts;
}

cd inner_numeric(const Leg& A, const Leg& B, double u) {
    const double vlo = std::max(2.0 * A.support_lo() - u, 2.0 * B.support_lo() + u);
    const double vhi = std::min(2.0 * A.support_hi() - u, 2.0 * B.support_hi() + u);
    if (vhi <= vlo) return 0.0;
    quad::Options opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-300;
    const double rate = 0.5 * ((A.analytic ? std::abs(A.nu) : A.osc) +
                               (B.analytic ? std::abs(B.nu) : B.osc));
    if (rate > 0.0) opt.max_panel = 2.0 * kPi / (8.0 * rate);
    for (double k : A.kinks) opt.break_points.push_back(2.0 * k - u);
    for (double k : B.kinks) opt.break_points.push_back(2.0 * k + u);
    auto f = [&](double v) { return A.value(0.5 * (v + u)) * B.value(0.5 * (v - u)); };
    return 0.5 * quad::integrate_noexcept(f, vlo, vhi, opt).value;
}

std::vector<double> outer_kinks(const Leg& A, const Leg& B) {
    std::vector<double> ka{A.support_lo(), A.support_hi()};
    std::vector<double> kb{B.support_lo(), B.support_hi()};
    for (double k : A.kinks) ka.push_back(k);
    for (double k : B.kinks) kb.push_back(k);
    std::vector<double> out;
    for (double x : ka)
        for (double y : kb) out.push_back(x - y);
    return out;
}

} // namespace

cd inner_product(const Leg& a, const Leg& b, cd u) {
    if (a.analytic && b.analytic) {
        const InnerParts p = inner_parts_analytic(a, b, u);
        return p.prefactor * std::exp(p.exponent);
    }
    if (u.imag() != 0.0)
        throw std::logic_error("inner_product: complex u needs analytic legs");
    return inner_numeric(a, b, u.real());
}

OuterKernel wightman_kernel(const FieldModel& f, double eps, double d, double smear_a) {
    OuterKernel k;
    if (f.is_minkowski()) {
        if (smear_a > 0.0) {
            k.eval = [eps, d, smear_a](cd u) {
                return kernels::mink_w_smeared(u - cd(0.0, eps), d, smear_a);
            };
        } else {
            k.eval = [eps, d](cd u) { return kernels::mink_w(u - cd(0.0, eps), d); };
        }
        if (d > 0.0) k.singular = {-d, 0.0, d};
        else k.singular = {0.0};
        k.osc = 0.0;
    } else {
        const FiniteModeCavity c = f.cavity();
        k.eval = [c, d](cd u) { return kernels::cavity_w(c, u, 0.0, d); };
        k.osc = kernels::cavity_mode_freq(c, c.mode_count);
    }
    return k;
}

OuterKernel wightman_dd_kernel(const FieldModel& f, double eps, double d, double smear_a) {
    OuterKernel k;
    if (f.is_minkowski()) {
        if (smear_a > 0.0) {
            k.eval = [eps, d, smear_a](cd u) {
                return kernels::mink_wdd_smeared(u - cd(0.0, eps), d, smear_a);
            };
        } else {
            k.eval = [eps, d](cd u) { return kernels::mink_wdd(u - cd(0.0, eps), d); };
        }
        if (d > 0.0) k.singular = {-d, 0.0, d};
        else k.singular = {0.0};
        k.osc = 0.0;
    } else {
        const FiniteModeCavity c = f.cavity();
        k.eval = [c, d](cd u) { return kernels::cavity_wdd(c, u, 0.0, d); };
        k.osc = kernels::cavity_mode_freq(c, c.mode_count);
    }
    return k;
}

double choose_contour_shift(const Leg& a, const Leg& b, double kappa) {
    if (!a.analytic || !b.analytic) return 0.0;
    (void)kappa;
    // Fit the total inner exponent Q(u) = alpha + beta u + gamma u^2 from three
    // real evaluations, then minimise Re Q(x* - i s) over s.
    const double h = 0.5 * (a.sg + b.sg);
    const cd q0 = inner_parts_analytic(a, b, 0.0).exponent;
    const cd qp = inner_parts_analytic(a, b, h).exponent;
    const cd qm = inner_parts_analytic(a, b, -h).exponent;
    const cd gamma = (qp + qm - 2.0 * q0) / (2.0 * h * h);
    const cd beta = (qp - qm) / (2.0 * h);
    if (!(gamma.real() < 0.0)) return 0.0;
    const double x_peak = -beta.real() / (2.0 * gamma.real());
    // d/ds Re Q(x - i s) = Im beta - 2 s Re gamma + 2 x Im gamma
    double s = (beta.imag() + 2.0 * x_peak * gamma.imag()) / (2.0 * gamma.real());
    if (!(s > 0.0) || !std::isfinite(s)) return 0.0;
    return std::min(s, 1e6);
}

namespace {

quad::Options outer_options(const Leg& a, const Leg& b, const OuterKernel& g,
                            const PairOptions& opt) {
    quad::Options q;
    q.rel_tol = opt.rel_tol;
    q.abs_tol = std::max(opt.abs_tol, 1e-300);
    q.max_segments = opt.max_segments;
    const double tmin = std::min(a.analytic ? a.sg : (a.hi - a.lo),
                                 b.analytic ? b.sg : (b.hi - b.lo));
    double rate = a.analytic && b.analytic
                      ? 0.5 * std::abs(a.nu - b.nu)
                      : 0.5 * ((a.analytic ? std::abs(a.nu) : a.osc) +
                               (b.analytic ? std::abs(b.nu) : b.osc));
    rate += g.osc;
    q.max_panel = tmin / 20.0;
    if (rate > 0.0) q.max_panel = std::min(q.max_panel, kPi / (4.0 * rate));
    return q;
}

std::pair<double, double> outer_range(const Leg& a, const Leg& b) {
    return {a.support_lo() - b.support_hi(), a.support_hi() - b.support_lo()};
}

} // namespace

cd pair_full_line(const Leg& a, const Leg& b, const OuterKernel& g, double contour_shift,
                  const PairOptions& opt) {
    auto [lo, hi] = outer_range(a, b);
    quad::Options q = outer_options(a, b, g, opt);
    if (contour_shift > 0.0) {
        if (!g.complex_ok || !a.analytic || !b.analytic)
            throw std::logic_error("pair_full_line: contour shift needs analytic data");
        const cd shift(0.0, -contour_shift);
        auto f = [&](double x) {
            const cd u = cd(x, 0.0) + shift;
            return inner_product(a, b, u) * g.eval(u);
        };
        return quad::integrate(f, lo, hi, q).value;
    }
    for (double s : g.singular) q.break_points.push_back(s);
    for (double kk : outer_kinks(a, b)) q.break_points.push_back(kk);
    auto f = [&](double x) { return inner_product(a, b, cd(x, 0.0)) * g.eval(cd(x, 0.0)); };
    return quad::integrate(f, lo, hi, q).value;
}

cd pair_time_ordered(const Leg& a, const Leg& b, const OuterKernel& g,
                     const PairOptions& opt) {
    auto [lo, hi] = outer_range(a, b);
    quad::Options q = outer_options(a, b, g, opt);
    for (double s : g.singular) q.break_points.push_back(s);
    for (double kk : outer_kinks(a, b)) q.break_points.push_back(kk);
    auto f = [&](double x) {
        return inner_product(a, b, cd(x, 0.0)) * g.eval(cd(std::abs(x), 0.0));
    };
    cd total = 0.0;
    if (hi > 0.0) total += quad::integrate(f, std::max(lo, 0.0), hi, q).value;
    if (lo < 0.0) total += quad::integrate(f, lo, std::min(hi, 0.0), q).value;
    return total;
}

cd pair_nested(const Leg& a, const Leg& b, const OuterKernel& g, bool time_ordered,
               const PairOptions& opt) {
    const double blo = b.support_lo(), bhi = b.support_hi();
    const double tmin = std::min(a.analytic ? a.sg : (a.hi - a.lo),
                                 b.analytic ? b.sg : (b.hi - b.lo));

    quad::Options qi;
    qi.rel_tol = std::max(opt.rel_tol * 0.1, 1e-12);
    qi.abs_tol = 1e-300;
    const double rate_b = (b.analytic ? std::abs(b.nu) : b.osc) + g.osc;
    qi.max_panel = tmin / 20.0;
    if (rate_b > 0.0) qi.max_panel = std::min(qi.max_panel, kPi / (4.0 * rate_b));
    qi.max_segments = 4000;

    auto inner = [&](double t) {
        auto fi = [&](double tp) {
            const double u = t - tp;
            const cd ker = time_ordered ? g.eval(cd(std::abs(u), 0.0)) : g.eval(cd(u, 0.0));
            return b.value(tp) * ker;
        };
        quad::Options qq = qi;
        qq.break_points.push_back(t);
        for (double s : g.singular) {
            qq.break_points.push_back(t - s);
            qq.break_points.push_back(t + s);
        }
        for (double kk : b.kinks) qq.break_points.push_back(kk);
        return quad::integrate_noexcept(fi, blo, bhi, qq).value;
    };

    quad::Options qo;
    qo.rel_tol = opt.rel_tol;
    qo.abs_tol = 1e-300;
    const double rate_a = (a.analytic ? std::abs(a.nu) : a.osc) + g.osc;
    qo.max_panel = tmin / 20.0;
    if (rate_a > 0.0) qo.max_panel = std::min(qo.max_panel, kPi / (4.0 * rate_a));
    qo.max_segments = 800;
    for (double kk : a.kinks) qo.break_points.push_back(kk);
    auto fo = [&](double t) { return a.value(t) * inner(t); };
    return quad::integrate_noexcept(fo, a.support_lo(), a.support_hi(), qo).value;
}

cd spectral_pair(const SpectralWeight& sw, int wpow, double smear_a,
                 const std::function<cd(double)>& FA, const std::function<cd(double)>& FB,
                 double T_scale, double rel_tol) {
    auto weight = [&](double w) {
        double r = std::pow(w, wpow);
        if (smear_a > 0.0) r *= std::exp(-smear_a * w * w);
        return r;
    };
    if (sw.atomic) {
        cd s = 0.0;
        for (const auto& [w, c] : sw.atoms) s += c * weight(w) * FA(w) * std::conj(FB(w));
        return s;
    }
    auto f = [&](double w) {
        return sw.density(w) * weight(w) * FA(w) * std::conj(FB(w));
    };
    quad::Options q;
    q.rel_tol = rel_tol;
    q.abs_tol = 1e-300;
    q.max_segments = 60000;
    const double freq = sw.separation + 2.5 * T_scale;
    q.max_panel = kPi / (2.0 * freq);

    double c_prev = 0.0;
    double c_next = std::max(16.0 / T_scale, 8.0 * freq / (T_scale * T_scale));
    cd total = 0.0;
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 28; ++it) {
        const cd chunk = quad::integrate_noexcept(f, c_prev, c_next, q).value;
        total += chunk;
        const double mag = std::abs(chunk);
        if (mag <= 0.5 * rel_tol * std::abs(total) && last <= 0.5 * rel_tol * std::abs(total))
            return total;
        last = mag;
        c_prev = c_next;
        c_next *= 2.0;
        if (c_next > 3e6 / T_scale)
            throw numerical_error("spectral integral tail did not converge", mag);
    }
    throw numerical_error("spectral integral tail did not converge",
                          std::abs(last));
}

} // namespace udw::detail

// ---------------------------------------------------------------------------
// public detector operations
// ---------------------------------------------------------------------------

namespace udw {
namespace {

using detail::Leg;
using detail::OuterKernel;

constexpr double kPi2 = std::numbers::pi;

void default_warn(const std::string& msg) { std::cerr << "udw: " << msg << "\n"; }

void warn(const EngineOptions& opt, const std::string& msg) {
    if (opt.warn) opt.warn(msg);
    else default_warn(msg);
}

double pair_separation(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace

void DetectorConfig::validate(const FieldModel& field) const {
    field.validate();
    if (!(gap > 0.0)) throw std::invalid_argument("detector gap must be > 0");
    if (!std::isfinite(coupling)) throw std::invalid_argument("detector coupling must be finite");
    if (std::holds_alternative<GaussianBall>(smearing)) {
        if (!(std::get<GaussianBall>(smearing).width > 0.0))
            throw std::invalid_argument("GaussianBall width must be > 0");
        if (!field.is_minkowski())
            throw std::invalid_argument("smeared detectors are supported on Minkowski only");
    }
    if (!field.is_minkowski()) {
        const double L = field.cavity().length;
        if (!(position[0] > 0.0 && position[0] < L))
            throw std::invalid_argument("cavity detector position must lie inside (0, L)");
    }
    if (has_dual()) {
        if (dual().grid.empty()) throw std::invalid_argument("dual switching has no grid");
    } else {
        spec().validate();
    }
}

double DetectorConfig::smear_sq() const {
    if (std::holds_alternative<GaussianBall>(smearing)) {
        const double s = std::get<GaussianBall>(smearing).width;
        return s * s;
    }
    return 0.0;
}

double DetectorConfig::timescale() const {
    return has_dual() ? dual().base.timescale : spec().timescale;
}

DetectorState final_state(double p) {
    if (p < -1e-10 || p > 1.0 + 1e-10)
        throw std::domain_error("final_state: probability outside [0,1]; "
                                "perturbative result not valid");
    p = std::clamp(p, 0.0, 1.0);
    DetectorState s;
    s.p_excited = p;
    s.matrix = {{{1.0 - p, 0.0}, {0.0, p}}};
    return s;
}

namespace detail {

// Exact-dual transform G(w) = Int f_Omega(t) e^{-i w t} dt under the adiabatic
// prescription: finite box + analytic constant tail f(inf) e^{-i w tcut}/(i w).
cd dual_transform_quadrature(const DualSwitching& dual, double w) {
    const SwitchingSpec& base = dual.base;
    const double tlo = base.center - base.support_radius() - 1.0 * base.timescale;
    const double tcut = base.center + base.support_radius() + 1.0 * base.timescale;
    quad::Options q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-300;
    const double rate = dual.gap + w;
    q.max_panel = rate > 0.0 ? kPi2 / (4.0 * rate) : 0.0;
    auto f = [&](double t) {
        return lower_incomplete_fourier(base, dual.gap, t) * std::polar(1.0, -w * t);
    };
    const cd box = quad::integrate_noexcept(f, tlo, tcut, q).value;
    const cd finf = fourier_transform(base, dual.gap);
    return box + finf * std::polar(1.0, -w * tcut) / cd(0.0, w);
}

cd dual_transform_closed(const DualSwitching& dual, double w) {
    return fourier_transform(dual.base, dual.gap + w) / cd(0.0, w);
}

struct RateResult {
    cd spectral;
    cd time_domain;
};

// Shared excitation-type integral: legs (K_A at t, K_B at t'), wpow selects
// W / W~; returns both routes. eps_factors in units of the shortest timescale.
RateResult excitation_rate(const FieldModel& field, const Leg& legA, const Leg& legB,
                           const std::function<cd(double)>& FA,
                           const std::function<cd(double)>& FB, int wpow, double d,
                           double smear_a, double T_scale, double kappa,
                           const std::vector<double>& eps_factors) {
    RateResult out;
    // spectral route
    SpectralWeight weight;
    if (field.is_minkowski()) {
        weight.atomic = false;
        weight.separation = d;
    } else {
        throw std::logic_error("excitation_rate: cavity weight must be provided by caller");
    }
    out.spectral = spectral_pair(weight, wpow, smear_a, FA, FB, T_scale);

    // time route
    auto make_kernel = [&](double eps) {
        return wpow == 2 ? wightman_dd_kernel(field, eps, d, smear_a)
                         : wightman_kernel(field, eps, d, smear_a);
    };
    const double shift = choose_contour_shift(legA, legB, kappa);
    if (shift > 0.5 * T_scale) {
        out.time_domain = pair_full_line(legA, legB, make_kernel(0.0), shift);
    } else {
        std::vector<double> xs;
        std::vector<cd> ys;
        for (double ef : eps_factors) {
            const double eps = ef * T_scale;
            xs.push_back(eps);
            ys.push_back(pair_full_line(legA, legB, make_kernel(eps), 0.0));
        }
        out.time_domain = quad::neville_zero(xs, ys);
    }
    return out;
}

} // namespace detail

namespace {

struct SingleRate {
    double value = 0.0;
    RouteDiagnostics diag;
};

// Excitation probability per unit lambda^2 for one detector (i == j case),
// with route cross-validation.
SingleRate single_rate(const DetectorConfig& det, const FieldModel& field, int wpow,
                       const EngineOptions& opt) {
    det.validate(field);
    const double smear_a = det.smear_sq(); // (sigma^2 + sigma^2)/2
    const double T = det.timescale();
    SingleRate out;

    cd spectral, timedom;
    if (det.has_dual()) {
        // exact dual: factorised transforms; both routes through the weight
        const DualSwitching& dual = det.dual();
        const SpectralWeight sw = spectral_weight(
            field, Event{0.0, det.position}, Event{0.0, det.position});
        auto Fq = [&](double w) { return detail::dual_transform_quadrature(dual, w); };
        auto Fc = [&](double w) { return detail::dual_transform_closed(dual, w); };
        spectral = detail::spectral_pair(sw, 2, smear_a, Fc, Fc, T);
        timedom = detail::spectral_pair(sw, 2, smear_a, Fq, Fq, T);
    } else {
        const SwitchingSpec& spec = det.spec();
        if (wpow == 2 && field.is_minkowski() && smear_a == 0.0 &&
            2 * detail::transform_tail_power(spec) <= 4)
            throw divergence_error(
                "derivative-coupled response diverges (UV) for a non-smooth switching "
                "with a pointlike detector on the Minkowski vacuum",
                std::numeric_limits<double>::infinity());
        const double gap = det.gap;
        Leg legA = detail::switching_leg(spec, -gap);
        Leg legB = detail::switching_leg(spec, +gap);
        auto F = [spec, gap](double w) { return fourier_transform(spec, gap + w); };
        if (field.is_minkowski()) {
            const auto r = detail::excitation_rate(
                field, legA, legB, F, F, wpow, 0.0, smear_a, T, gap,
                wpow == 2 ? opt.eps_wdd : opt.eps_w);
            spectral = r.spectral;
            timedom = r.time_domain;
        } else {
            const SpectralWeight sw = spectral_weight(
                field, Event{0.0, det.position}, Event{0.0, det.position});
            spectral = detail::spectral_pair(sw, wpow, smear_a, F, F, T);
            const double xd = det.position[0];
            detail::OuterKernel g;
            const FiniteModeCavity c = field.cavity();
            if (wpow == 2)
                g.eval = [c, xd](cd u) { return kernels::cavity_wdd(c, u, xd, xd); };
            else
                g.eval = [c, xd](cd u) { return kernels::cavity_w(c, u, xd, xd); };
            g.osc = kernels::cavity_mode_freq(c, c.mode_count);
            const double shift = detail::choose_contour_shift(legA, legB, gap);
            timedom = detail::pair_full_line(legA, legB, g, shift > 0.5 * T ? shift : 0.0);
        }
    }

    const double scale = std::max(std::abs(spectral), std::abs(timedom));
    const double rel = scale > 0.0 ? std::abs(spectral - timedom) / scale : 0.0;
    out.diag.spectral = spectral.real();
    out.diag.time_domain = timedom.real();
    out.diag.rel_difference = rel;
    if (opt.cross_validate && rel > opt.route_failure)
        throw cross_validation_error("excitation probability routes disagree", spectral,
                                     timedom);
    if (std::abs(spectral.imag()) > 1e-10 * std::max(1.0, std::abs(spectral)))
        throw numerical_error("excitation probability has a non-negligible imaginary part",
                              std::abs(spectral.imag()));
    out.value = spectral.real();
    return out;
}

} // namespace

double excitation_probability(const DetectorConfig& det, const FieldModel& field,
                              const EngineOptions& opt, RouteDiagnostics* diag) {
    if (det.coupling_kind != CouplingKind::Amplitude)
        throw std::invalid_argument("excitation_probability expects an amplitude coupling");
    if (det.has_dual())
        throw std::invalid_argument("amplitude coupling takes a SwitchingSpec switching");
    if (det.coupling == 0.0) return 0.0;
    const SingleRate r = single_rate(det, field, 0, opt);
    if (diag) *diag = r.diag;
    double L = det.coupling * det.coupling * r.value;
    if (L < 0.0 && L > -1e-12) L = 0.0;
    if (L > opt.warn_probability)
        warn(opt, "excitation probability " + std::to_string(L) +
                      " exceeds the perturbative validity guard (0.1)");
    return L;
}

double excitation_probability_derivative(const DetectorConfig& det, const FieldModel& field,
                                         const EngineOptions& opt, RouteDiagnostics* diag) {
    if (det.coupling_kind != CouplingKind::Derivative)
        throw std::invalid_argument(
            "excitation_probability_derivative expects a derivative coupling");
    if (det.coupling == 0.0) return 0.0;
    const SingleRate r = single_rate(det, field, 2, opt);
    if (diag) *diag = r.diag;
    double L = det.coupling * det.coupling * r.value;
    if (L < 0.0 && L > -1e-12) L = 0.0;
    if (L > opt.warn_probability)
        warn(opt, "excitation probability " + std::to_string(L) +
                      " exceeds the perturbative validity guard (0.1)");
    return L;
}

double coupling_duality_residual(const SwitchingSpec& spec, double omega,
                                 const FieldModel& field,
                                 const std::array<double, 3>& position,
                                 const EngineOptions& opt) {
    if (!(omega > 0.0)) throw std::invalid_argument("coupling_duality_residual: omega > 0");
    DetectorConfig amp;
    amp.gap = omega;
    amp.coupling = 1.0;
    amp.switching = spec;
    amp.position = position;
    amp.coupling_kind = CouplingKind::Amplitude;

    DetectorConfig der = amp;
    der.coupling = 1.0 / omega; // chi~ = chi/Omega realised through the coupling
    der.coupling_kind = CouplingKind::Derivative;

    const double L = excitation_probability(amp, field, opt);
    if (L < 1e-300)
        throw numerical_error("coupling_duality_residual: excitation probability degenerate",
                              L);
    const double Lt = excitation_probability_derivative(der, field, opt);
    return std::abs(L - Lt) / L;
}

} // namespace udw
