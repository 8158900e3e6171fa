#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "udw/errors.hpp"
#include "udw/quadrature.hpp"

using namespace udw;
using quad::cd;

TEST_CASE("polynomials and classics") {
    auto r = quad::integrate([](double x) { return cd(x * x * x, 0.0); }, 0, 1);
    CHECK(r.value.real() == doctest::Approx(0.25).epsilon(1e-14));
    r = quad::integrate([](double x) { return cd(std::sin(x), 0.0); }, 0, M_PI);
    CHECK(r.value.real() == doctest::Approx(2.0).epsilon(1e-13));
    r = quad::integrate([](double x) { return cd(1.0 / (1.0 + x * x), 0.0); }, 0, 1);
    CHECK(r.value.real() == doctest::Approx(M_PI / 4).epsilon(1e-13));
}

TEST_CASE("oscillatory integrand against the exact primitive") {
    const double k = 137.0;
    quad::Options opt;
    opt.max_panel = M_PI / (4.0 * k);
    auto r = quad::integrate([k](double x) { return std::polar(1.0, k * x); }, -1.0, 2.0, opt);
    const cd exact = (std::polar(1.0, 2.0 * k) - std::polar(1.0, -k)) / cd(0.0, k);
    CHECK(std::abs(r.value - exact) < 1e-12);
}

TEST_CASE("break points let the rule handle corners") {
    auto f = [](double x) { return cd(std::abs(x), 0.0); };
    quad::Options opt;
    opt.break_points = {0.0};
    auto r = quad::integrate(f, -1, 1, opt);
    CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("near-singular integrand converges with refinement") {
    const double eps = 1e-5;
    auto f = [eps](double x) { return cd(1.0, 0.0) / (x * x + eps * eps); };
    quad::Options opt;
    opt.break_points = {0.0};
    auto r = quad::integrate(f, -1, 1, opt);
    const double exact = 2.0 * std::atan(1.0 / eps) / eps;
    CHECK(r.value.real() == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("trapezoid") {
    std::vector<double> x{0, 0.5, 1.0}, y{0, 0.5, 1.0};
    CHECK(quad::trapezoid(y, x) == doctest::Approx(0.5));
}

TEST_CASE("neville extrapolation to zero") {
    // f(eps) = 3 - 2 eps + eps^2 sampled at three points -> exactly 3
    std::vector<double> xs{0.1, 0.05, 0.01};
    std::vector<cd> ys;
    for (double x : xs) ys.push_back(cd(3.0 - 2.0 * x + x * x, 0.0));
    double err = 0.0;
    const cd v = quad::neville_zero(xs, ys, &err);
    CHECK(std::abs(v - cd(3.0, 0.0)) < 1e-13);
}

TEST_CASE("budget exhaustion throws with an estimate") {
    // genuinely divergent endpoint singularity
    auto f = [](double x) { return cd(1.0 / x, 0.0); };
    quad::Options opt;
    opt.max_segments = 60;
    CHECK_THROWS_AS(quad::integrate(f, 0.0, 1.0, opt), numerical_error);
}
