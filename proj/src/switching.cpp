#include "udw/switching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "udw/errors.hpp"
#include "udw/faddeeva.hpp"
#include "udw/quadrature.hpp"

namespace udw {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// int_{x0}^{x1} e^{i k x} dx, exact and stable through k -> 0.
cd exp_segment(double k, double x0, double x1) {
    const double d = x1 - x0;
    const double m = 0.5 * (x0 + x1);
    const double h = 0.5 * k * d;
    const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
    return d * std::polar(1.0, k * m) * sinc;
}

// Gaussian incomplete transform around centre 0, T = spec.timescale:
// f(tau) = int_{-inf}^{tau} e^{-x^2/2T^2}/sqrt(2 pi) e^{-i Om x} dx
//        = (T/2) e^{-Om^2 T^2/2} (1 + erf((tau/T + i Om T)/sqrt 2))
// evaluated in overflow-free form through the Faddeeva function.
cd gaussian_incomplete(double T, double omega, double tau) {
    const double r = tau / T;
    const double q = omega * T;
    const cd z = cd(r, q) / std::numbers::sqrt2;
    const cd osc = std::exp(-0.5 * r * r) * std::polar(1.0, -omega * tau);
    if (tau >= 0.0) {
        // 1 + erf(z) = 2 - erfc(z),  erfc(z) = e^{-z^2} w(iz), Im(iz) >= 0
        const cd wiz = faddeeva_w(cd(-z.imag(), z.real()));
        return T * std::exp(-0.5 * q * q) - 0.5 * T * osc * wiz;
    }
    // 1 + erf(z) = erfc(-z) = e^{-z^2} w(-iz), Im(-iz) >= 0 for tau < 0
    const cd wmiz = faddeeva_w(cd(z.imag(), -z.real()));
    return 0.5 * T * osc * wmiz;
}

cd compact_cosine_incomplete(double T, double omega, double tau) {
    const double a = kPi / T;
    const double hi = std::clamp(tau, -0.5 * T, 0.5 * T);
    if (hi <= -0.5 * T) return 0.0;
    return 0.25 * kPi *
           (exp_segment(a - omega, -0.5 * T, hi) + exp_segment(-a - omega, -0.5 * T, hi));
}

cd compact_cosine_sq_incomplete(double T, double omega, double tau) {
    const double a = kPi / T;
    const double hi = std::clamp(tau, -0.5 * T, 0.5 * T);
    if (hi <= -0.5 * T) return 0.0;
    return exp_segment(-omega, -0.5 * T, hi) +
           0.5 * (exp_segment(2 * a - omega, -0.5 * T, hi) +
                  exp_segment(-2 * a - omega, -0.5 * T, hi));
}

double tabulated_eval(const SwitchingSpec& s, double tau) {
    const auto& p = s.samples;
    if (p.empty() || tau <= p.front().first || tau >= p.back().first) {
        if (!p.empty() && (tau == p.front().first || tau == p.back().first)) {
            return tau == p.front().first ? p.front().second : p.back().second;
        }
        return 0.0;
    }
    auto it = std::upper_bound(p.begin(), p.end(), tau,
                               [](double v, const auto& q) { return v < q.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *std::prev(it);
    const double w = (tau - x0) / (x1 - x0);
    return y0 + w * (y1 - y0);
}

cd tabulated_incomplete(const SwitchingSpec& s, double omega, double tau) {
    const auto& p = s.samples;
    if (p.empty() || tau <= p.front().first) return 0.0;
    const double hi = std::min(tau, p.back().first);
    quad::Options opt;
    opt.abs_tol = 1e-13 * s.timescale;
    opt.rel_tol = 1e-12;
    if (omega > 0.0) opt.max_panel = 2.0 * kPi / (8.0 * omega);
    for (const auto& [x, y] : p)
        if (x > p.front().first && x < hi) opt.break_points.push_back(x);
    auto f = [&](double x) { return tabulated_eval(s, x) * std::polar(1.0, -omega * x); };
    auto r = quad::integrate_noexcept(f, p.front().first, hi, opt);
    if (r.error > 1e-8 * s.timescale)
        throw numerical_error("tabulated switching transform did not converge", r.error);
    return r.value;
}

} // namespace

SwitchingSpec::SwitchingSpec(SwitchingKind k, double T, double c)
    : kind(k), timescale(T), center(c) {
    validate();
}

SwitchingSpec SwitchingSpec::tabulated(std::vector<std::pair<double, double>> s) {
    SwitchingSpec spec;
    spec.kind = SwitchingKind::Tabulated;
    spec.samples = std::move(s);
    std::sort(spec.samples.begin(), spec.samples.end());
    if (!spec.samples.empty())
        spec.timescale = spec.samples.back().first - spec.samples.front().first;
    spec.validate();
    return spec;
}

void SwitchingSpec::validate() const {
    if (!(timescale > 0.0))
        throw std::invalid_argument("switching timescale must be positive");
    if (!std::isfinite(timescale) || !std::isfinite(center))
        throw std::invalid_argument("switching parameters must be finite");
    if (kind == SwitchingKind::Tabulated) {
        if (samples.size() < 2)
            throw std::invalid_argument("tabulated switching needs at least two samples");
        for (size_t i = 0; i + 1 < samples.size(); ++i)
            if (!(samples[i].first < samples[i + 1].first))
                throw std::invalid_argument("tabulated samples must be strictly increasing in tau");
    }
}

std::vector<double> SwitchingSpec::default_grid() const {
    double lo, hi;
    int n;
    if (kind == SwitchingKind::Gaussian) {
        lo = center - 8.0 * timescale;
        hi = center + 8.0 * timescale;
        n = 3201;
    } else if (kind == SwitchingKind::Tabulated) {
        lo = samples.front().first;
        hi = samples.back().first;
        n = 3201;
    } else {
        lo = center - timescale;
        hi = center + timescale;
        n = 4001;
    }
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

double SwitchingSpec::support_radius() const {
    switch (kind) {
        case SwitchingKind::Gaussian: return 8.5 * timescale;
        case SwitchingKind::Tabulated:
            return std::max(std::abs(samples.front().first - center),
                            std::abs(samples.back().first - center));
        default: return 0.5 * timescale;
    }
}

double eval_switching(const SwitchingSpec& spec, double tau) {
    spec.validate();
    const double T = spec.timescale;
    const double u = tau - spec.center;
    switch (spec.kind) {
        case SwitchingKind::Gaussian:
            return std::exp(-0.5 * u * u / (T * T)) / kSqrt2Pi;
        case SwitchingKind::CompactCosine:
            return std::abs(u) < 0.5 * T ? 0.5 * kPi * std::cos(kPi * u / T) : 0.0;
        case SwitchingKind::CompactCosineSq: {
            if (std::abs(u) >= 0.5 * T) return 0.0;
            const double c = std::cos(kPi * u / T);
            return 2.0 * c * c;
        }
        case SwitchingKind::Tabulated: return tabulated_eval(spec, tau);
    }
    return 0.0;
}

double eval_switching_derivative(const SwitchingSpec& spec, double tau) {
    spec.validate();
    const double T = spec.timescale;
    const double u = tau - spec.center;
    switch (spec.kind) {
        case SwitchingKind::Gaussian:
            return -u / (T * T) * std::exp(-0.5 * u * u / (T * T)) / kSqrt2Pi;
        case SwitchingKind::CompactCosine:
            return std::abs(u) < 0.5 * T ? -0.5 * kPi * kPi / T * std::sin(kPi * u / T) : 0.0;
        case SwitchingKind::CompactCosineSq:
            return std::abs(u) < 0.5 * T ? -2.0 * kPi / T * std::sin(2.0 * kPi * u / T) : 0.0;
        case SwitchingKind::Tabulated: {
            const auto& p = spec.samples;
            if (p.empty() || tau < p.front().first || tau >= p.back().first) return 0.0;
            auto it = std::upper_bound(p.begin(), p.end(), tau,
                                       [](double v, const auto& q) { return v < q.first; });
            const auto& [x1, y1] = *it;
            const auto& [x0, y0] = *std::prev(it);
            return (y1 - y0) / (x1 - x0);
        }
    }
    return 0.0;
}

cd lower_incomplete_fourier(const SwitchingSpec& spec, double omega, double tau) {
    spec.validate();
    if (omega < 0.0) throw std::invalid_argument("lower_incomplete_fourier: omega must be >= 0");
    // centre shift: f(tau) = e^{-i omega c} f0(tau - c)
    const cd shift = std::polar(1.0, -omega * spec.center);
    const double u = tau - spec.center;
    switch (spec.kind) {
        case SwitchingKind::Gaussian:
            return shift * gaussian_incomplete(spec.timescale, omega, u);
        case SwitchingKind::CompactCosine:
            return shift * compact_cosine_incomplete(spec.timescale, omega, u);
        case SwitchingKind::CompactCosineSq:
            return shift * compact_cosine_sq_incomplete(spec.timescale, omega, u);
        case SwitchingKind::Tabulated: return tabulated_incomplete(spec, omega, tau);
    }
    return 0.0;
}

cd fourier_transform(const SwitchingSpec& spec, double omega) {
    spec.validate();
    const double T = spec.timescale;
    const cd shift = std::polar(1.0, -omega * spec.center);
    switch (spec.kind) {
        case SwitchingKind::Gaussian:
            return shift * T * std::exp(-0.5 * omega * omega * T * T);
        case SwitchingKind::CompactCosine:
            return shift * compact_cosine_incomplete(T, omega, 0.5 * T);
        case SwitchingKind::CompactCosineSq:
            return shift * compact_cosine_sq_incomplete(T, omega, 0.5 * T);
        case SwitchingKind::Tabulated:
            return tabulated_incomplete(spec, omega, spec.samples.back().first);
    }
    return 0.0;
}

namespace {

// Nearest-branch continuation: shift raw by 2 pi k to land closest to ref.
double unwrap_to(double raw, double ref) {
    const double two_pi = 2.0 * kPi;
    double k = std::round((ref - raw) / two_pi);
    return raw + k * two_pi;
}

// Walk the phase from tau0 (known theta0) to tau1, bisecting while adjacent
// jumps exceed pi/2, and return the unwrapped phase at tau1.
double walk_phase(const SwitchingSpec& spec, double omega, double tau0, double theta0,
                  double tau1, double modulus_floor, int depth = 0) {
    const cd f1 = lower_incomplete_fourier(spec, omega, tau1);
    if (std::abs(f1) < modulus_floor) return theta0; // extend by continuity
    const double raw = -std::arg(f1);
    const double cand = unwrap_to(raw, theta0);
    if (std::abs(cand - theta0) <= 0.5 * kPi || depth >= 48) return cand;
    const double mid = 0.5 * (tau0 + tau1);
    if (mid <= tau0 || mid >= tau1) return cand;
    const double theta_mid = walk_phase(spec, omega, tau0, theta0, mid, modulus_floor, depth + 1);
    return walk_phase(spec, omega, mid, theta_mid, tau1, modulus_floor, depth + 1);
}

} // namespace

DualSwitching dual_switching(const SwitchingSpec& spec, double omega,
                             const std::vector<double>& grid) {
    spec.validate();
    if (grid.empty()) throw std::invalid_argument("dual_switching: empty grid");
    if (!(omega > 0.0)) throw std::invalid_argument("dual_switching: omega must be > 0");
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("dual_switching: grid must be strictly increasing");

    DualSwitching d;
    d.gap = omega;
    d.grid = grid;
    d.base = spec;
    d.chi_tilde.resize(grid.size());
    d.theta.resize(grid.size());

    const double floor = 1e-14 * spec.timescale;
    bool have_branch = false;
    double theta_prev = 0.0;
    double tau_prev = grid.front();
    for (size_t i = 0; i < grid.size(); ++i) {
        const cd f = lower_incomplete_fourier(spec, omega, grid[i]);
        d.chi_tilde[i] = std::abs(f);
        if (d.chi_tilde[i] < floor) {
            d.theta[i] = have_branch ? theta_prev : 0.0;
        } else if (!have_branch) {
            d.theta[i] = -std::arg(f);
            have_branch = true;
        } else {
            d.theta[i] = walk_phase(spec, omega, tau_prev, theta_prev, grid[i], floor);
        }
        theta_prev = d.theta[i];
        tau_prev = grid[i];
    }
    d.boundary_value = d.chi_tilde.back();
    return d;
}

std::vector<double> DualSwitching::gap_profile() const {
    std::vector<double> g(grid.size(), 0.0);
    if (grid.size() < 2) return g;
    for (size_t i = 0; i < grid.size(); ++i) {
        const size_t lo = i == 0 ? 0 : i - 1;
        const size_t hi = i + 1 == grid.size() ? i : i + 1;
        g[i] = (theta[hi] - theta[lo]) / (grid[hi] - grid[lo]);
    }
    return g;
}

double large_gap_residual(const SwitchingSpec& spec, double omega,
                          const std::vector<double>& grid) {
    spec.validate();
    double sup = 0.0;
    for (double tau : grid) {
        const cd f = lower_incomplete_fourier(spec, omega, tau);
        const cd target = cd(0.0, 1.0) * eval_switching(spec, tau) * std::polar(1.0, -omega * tau);
        sup = std::max(sup, std::abs(omega * f - target));
    }
    return sup;
}

double l1_relative_distance(const std::vector<double>& f, const std::vector<double>& g,
                            const std::vector<double>& grid) {
    if (f.size() != g.size() || f.size() != grid.size())
        throw std::invalid_argument("l1_relative_distance: length mismatch");
    std::vector<double> num(f.size()), den(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        num[i] = std::abs(f[i] - g[i]);
        den[i] = std::abs(g[i]);
    }
    const double d = quad::trapezoid(den, grid);
    if (d == 0.0) throw std::domain_error("l1_relative_distance: reference integrates to zero");
    return quad::trapezoid(num, grid) / d;
}

double relative_area_difference(const std::vector<double>& f, const std::vector<double>& g,
                                const std::vector<double>& grid) {
    if (f.size() != g.size() || f.size() != grid.size())
        throw std::invalid_argument("relative_area_difference: length mismatch");
    std::vector<double> num(f.size());
    for (size_t i = 0; i < f.size(); ++i) num[i] = f[i] - g[i];
    const double d = quad::trapezoid(g, grid);
    if (d == 0.0) throw std::domain_error("relative_area_difference: reference integrates to zero");
    return quad::trapezoid(num, grid) / d;
}

PhaseFit phase_linearity_residual(const DualSwitching& dual) {
    PhaseFit fit;
    if (dual.grid.size() < 2) return fit;
    const double peak = *std::max_element(dual.chi_tilde.begin(), dual.chi_tilde.end());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t i = 0; i < dual.grid.size(); ++i) {
        if (dual.chi_tilde[i] <= 1e-6 * peak) continue;
        const double r = dual.theta[i] - dual.gap * dual.grid[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (!(lo <= hi)) return fit;
    fit.constant = 0.5 * (lo + hi);
    fit.residual = 0.5 * (hi - lo);
    return fit;
}

double phase_constant_offset(double c) {
    const double two_pi = 2.0 * kPi;
    double r = std::fmod(std::abs(c), two_pi); // in [0, 2 pi)
    double best = std::numeric_limits<double>::infinity();
    for (double target : {0.5 * kPi, 1.5 * kPi}) best = std::min(best, std::abs(r - target));
    return best;
}

} // namespace udw
