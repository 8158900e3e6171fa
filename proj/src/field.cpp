#include "udw/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "udw/faddeeva.hpp"

namespace udw {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;
const double kSqrtPi = std::sqrt(kPi);

double separation(const Event& a, const Event& b) {
    const double dx = a.x[0] - b.x[0];
    const double dy = a.x[1] - b.x[1];
    const double dz = a.x[2] - b.x[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace

void FieldModel::validate() const {
    if (is_minkowski()) {
        const auto& m = minkowski();
        if (m.mass != 0.0)
            throw std::invalid_argument("only the massless field is supported (mass must be 0)");
        if (!(m.epsilon > 0.0))
            throw std::invalid_argument("Minkowski regulator epsilon must be > 0");
    } else {
        const auto& c = cavity();
        if (!(c.length > 0.0)) throw std::invalid_argument("cavity length must be > 0");
        if (c.mode_count < 1) throw std::invalid_argument("cavity mode_count must be >= 1");
    }
}

FieldModel FieldModel::with_epsilon(double eps) const {
    FieldModel f = *this;
    if (f.is_minkowski()) std::get<MinkowskiVacuum>(f.model).epsilon = eps;
    return f;
}

namespace kernels {

cd mink_w(cd s, double d) {
    return -1.0 / (kFourPiSq * (s * s - d * d));
}

cd mink_wdd(cd s, double d) {
    const cd den = s * s - d * d;
    return (3.0 * s * s + d * d) / (2.0 * kPi * kPi * den * den * den);
}

// W_sm(s, d) = 1/(4 pi^2 d) Int_0^inf sin(w d) e^{-a w^2} e^{-i w s} dw
//            = (1/(4 pi^2 d)) (1/2i) (sqrt(pi)/(2 sqrt a)) [w(z1) - w(z2)],
//   z1 = (d - s)/(2 sqrt a), z2 = -(d + s)/(2 sqrt a).
// d -> 0 limit uses the derivative form.
cd mink_w_smeared(cd s, double d, double a) {
    const double ra = std::sqrt(a);
    const cd i(0.0, 1.0);
    if (d > 1e-12 * ra) {
        const cd z1 = (d - s) / (2.0 * ra);
        const cd z2 = -(d + s) / (2.0 * ra);
        return (1.0 / (kFourPiSq * d)) * (kSqrtPi / (4.0 * i * ra)) *
               (faddeeva_w(z1) - faddeeva_w(z2));
    }
    // Int_0^inf w e^{-a w^2 - i w s} dw = 1/(2a) + i s sqrt(pi)/(4 a^{3/2}) w(-s/(2 sqrt a))
    // (from d/ds of the d=0 half-Gaussian transform)
    const cd z = -s / (2.0 * ra);
    const cd half = 1.0 / (2.0 * a) - i * s * kSqrtPi / (4.0 * a * ra) * faddeeva_w(z);
    return half / kFourPiSq;
}

cd mink_wdd_smeared(cd s, double d, double a) {
    // -d^2/ds^2 of mink_w_smeared; w'(z) = -2 z w(z) + 2i/sqrt(pi)
    const double ra = std::sqrt(a);
    const cd i(0.0, 1.0);
    auto wpp = [&](cd z) { // w''(z) = (4z^2 - 2) w(z) - 4 i z / sqrt(pi)
        return (4.0 * z * z - 2.0) * faddeeva_w(z) - 4.0 * i * z / kSqrtPi;
    };
    if (d > 1e-12 * ra) {
        const cd z1 = (d - s) / (2.0 * ra);
        const cd z2 = -(d + s) / (2.0 * ra);
        // d^2/ds^2 w(z_k) = w''(z_k) / (4a) for both sign conventions
        return -(1.0 / (kFourPiSq * d)) * (kSqrtPi / (4.0 * i * ra)) * (1.0 / (4.0 * a)) *
               (wpp(z1) - wpp(z2));
    }
    // f(s) = 1/(2a) + C s w(z),  C = -i sqrt(pi)/(4 a^{3/2}),  z = -s/(2 ra)
    // f'' = C [ -w'(z)/ra + s w''(z)/(4a) ]
    const cd z = -s / (2.0 * ra);
    const cd w = faddeeva_w(z);
    const cd wp = -2.0 * z * w + 2.0 * i / kSqrtPi;
    const cd C = -i * kSqrtPi / (4.0 * a * ra);
    const cd fpp = C * (-wp / ra + s * wpp(z) / (4.0 * a));
    return -fpp / kFourPiSq;
}

double cavity_mode_freq(const FiniteModeCavity& c, int k) {
    return k * kPi / c.length;
}

double cavity_mode_amp(const FiniteModeCavity& c, int k, double x) {
    const double w = cavity_mode_freq(c, k);
    return std::sin(k * kPi * x / c.length) / std::sqrt(w * c.length);
}

cd cavity_w(const FiniteModeCavity& c, cd s, double xa, double xb) {
    cd sum = 0.0;
    for (int k = 1; k <= c.mode_count; ++k) {
        const double w = cavity_mode_freq(c, k);
        sum += cavity_mode_amp(c, k, xa) * cavity_mode_amp(c, k, xb) *
               std::exp(cd(0.0, -w) * s);
    }
    return sum;
}

cd cavity_wdd(const FiniteModeCavity& c, cd s, double xa, double xb) {
    cd sum = 0.0;
    for (int k = 1; k <= c.mode_count; ++k) {
        const double w = cavity_mode_freq(c, k);
        sum += w * w * cavity_mode_amp(c, k, xa) * cavity_mode_amp(c, k, xb) *
               std::exp(cd(0.0, -w) * s);
    }
    return sum;
}

} // namespace kernels

cd wightman(const FieldModel& field, const Event& a, const Event& b) {
    field.validate();
    const double dt = a.t - b.t;
    if (field.is_minkowski()) {
        const double eps = field.minkowski().epsilon;
        return kernels::mink_w(cd(dt, -eps), separation(a, b));
    }
    return kernels::cavity_w(field.cavity(), cd(dt, 0.0), a.x[0], b.x[0]);
}

cd wightman_dtau(const FieldModel& field, const Event& a, const Event& b) {
    field.validate();
    const double dt = a.t - b.t;
    if (field.is_minkowski()) {
        const double eps = field.minkowski().epsilon;
        return kernels::mink_wdd(cd(dt, -eps), separation(a, b));
    }
    return kernels::cavity_wdd(field.cavity(), cd(dt, 0.0), a.x[0], b.x[0]);
}

cd feynman(const FieldModel& field, const Event& a, const Event& b) {
    return a.t >= b.t ? wightman(field, a, b) : wightman(field, b, a);
}

double SpectralWeight::density(double omega) const {
    if (atomic) throw std::logic_error("SpectralWeight::density on an atomic spectrum");
    if (separation == 0.0) return omega / kFourPiSq;
    return std::sin(omega * separation) / (kFourPiSq * separation);
}

SpectralWeight spectral_weight(const FieldModel& field, const Event& a, const Event& b) {
    field.validate();
    SpectralWeight s;
    if (field.is_minkowski()) {
        s.atomic = false;
        s.separation = separation(a, b);
        return s;
    }
    const auto& c = field.cavity();
    s.atomic = true;
    s.atoms.reserve(c.mode_count);
    for (int k = 1; k <= c.mode_count; ++k)
        s.atoms.emplace_back(kernels::cavity_mode_freq(c, k),
                             kernels::cavity_mode_amp(c, k, a.x[0]) *
                                 kernels::cavity_mode_amp(c, k, b.x[0]));
    return s;
}

} // namespace udw
