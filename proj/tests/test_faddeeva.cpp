#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "udw/faddeeva.hpp"

using cd = std::complex<double>;
using udw::faddeeva_w;

namespace {

// Maclaurin series w(z) = sum (iz)^n / Gamma(n/2 + 1): independent oracle for
// small |z|.
cd w_series(cd z) {
    const cd iz(-z.imag(), z.real());
    cd term = 1.0, sum = 1.0;
    for (int n = 1; n < 120; ++n) {
        term *= iz / std::tgamma(0.5 * n + 1.0) * std::tgamma(0.5 * (n - 1) + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// deep Gautschi continued fraction: oracle for large |z|
cd w_cf(cd z, int depth = 40) {
    cd r = 0.0;
    for (int n = depth; n >= 1; --n) r = (0.5 * n) / (z - r);
    return cd(0.0, 1.0 / std::sqrt(M_PI)) / (z - r);
}

// mpmath (35 digits): w(z) = exp(-z^2) erfc(-iz)
struct Ref {
    double re, im, wre, wim;
};
constexpr Ref kRef[] = {
    {0.01, 0.01, 0.9887176929549546344878, 0.0110852960574772647222},
    {0.5, 0.0, 0.7788007830714048682452, 0.4789251729010434725449},
    {1.0, 0.0, 0.3678794411714423215955, 0.607157705841393729115},
    {2.0, 0.0, 0.01831563888873418029372, 0.3400262170660662012805},
    {5.5, 0.0, 7.287724095819692419343e-14, 0.1043674364367812078792},
    {0.0, 0.5, 0.6156903441929258748708, 0.0},
    {0.0, 3.0, 0.1790011511813899504193, 0.0},
    {1.5, 2.5, 0.1651358180237101369658, 0.08922180006361185659737},
    {-1.5, 2.5, 0.1651358180237101369658, -0.08922180006361185659737},
    {3.0, 0.001, 0.0002019724245573203145364, 0.201156542045597581599},
    {-3.0, 4.0, 0.09093390419476534246047, -0.06559233052791427773723},
    {6.9, 0.1, 0.001224200374498971919085, 0.08263556278353435702759},
    {7.1, 0.1, 0.00115403588405439756513, 0.08025942168526803101954},
    {10.0, 10.0, 0.02827946745423245665958, 0.02813843327633689563087},
    {50.0, 1.0, 0.0002257209595062749818711, 0.01128153265378452236167},
    {-120.0, 0.5, 0.00001959161685109241999384, -0.004701661488964698162145},
    {0.0, 100.0, 0.005641613782989432903556, 0.0},
    {700.0, 0.3, 3.454231879835764707184e-7, 0.0008059857937512881611139},
    {1e-08, 1e-08, 0.9999999887162083290449, 1.128379147095512747955e-8},
    {25.0, 0.0, 3.680855854801800602844e-272, 0.02258568091264047320443},
};

} // namespace

TEST_CASE("reference values, upper half-plane") {
    for (const Ref& r : kRef) {
        const cd w = faddeeva_w(cd(r.re, r.im));
        const cd expect(r.wre, r.wim);
        CHECK(std::abs(w - expect) <= 5e-13 * std::abs(expect) + 1e-280);
    }
}

TEST_CASE("series and continued-fraction cross-checks at 100 random arguments") {
    // design target: absolute accuracy 1e-12, validated against independent
    // series (small |z|) and continued-fraction (large |z|) evaluations
    std::mt19937 rng(7031);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const cd zs(1.5 * u(rng), 1.5 * std::abs(u(rng)));
        CHECK(std::abs(faddeeva_w(zs) - w_series(zs)) < 1e-12);
        const cd zl(12.0 * u(rng), 8.0 + 4.0 * std::abs(u(rng)));
        CHECK(std::abs(faddeeva_w(zl) - w_cf(zl)) < 1e-13);
    }
}

TEST_CASE("handoff continuity across |z| = 7") {
    for (double phi = 0.05; phi < M_PI; phi += 0.17) {
        const cd a = std::polar(6.999, phi), b = std::polar(7.001, phi);
        CHECK(std::abs(faddeeva_w(a) - faddeeva_w(b)) < 1e-10 * std::abs(faddeeva_w(a)));
    }
}

TEST_CASE("basic identities") {
    CHECK(faddeeva_w(cd(0, 0)).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(faddeeva_w(cd(0, 0)).imag() == doctest::Approx(0.0));
    // w(-conj(z)) = conj(w(z)) in the upper half-plane
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 20; ++i) {
        const cd z(u(rng), std::abs(u(rng)));
        const cd lhs = faddeeva_w(cd(-z.real(), z.imag()));
        const cd rhs = std::conj(faddeeva_w(z));
        CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(rhs));
    }
    // lower half-plane via reflection: w(z) + w(-z) = 2 exp(-z^2)
    const cd z(0.7, -0.4);
    CHECK(std::abs(faddeeva_w(z) + faddeeva_w(-z) - 2.0 * std::exp(-z * z)) < 1e-12);
}
