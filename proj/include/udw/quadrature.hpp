#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace udw::quad {

using cd = std::complex<double>;

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
    double max_panel = 0.0;       // 0 => no cap; else initial panels no wider than this
    int max_segments = 20000;
    std::vector<double> break_points; // interior points to split at up front
};

struct Result {
    cd value{};
    double error = 0.0;    // estimated absolute error
    long evaluations = 0;
};

// Globally adaptive Gauss-Kronrod 15(7) on [a, b] for a complex-valued
// integrand of a real variable. Splits the worst segment until the summed
// error estimate meets abs_tol + rel_tol*|value| or the segment budget runs
// out (then throws numerical_error carrying the estimate).
Result integrate(const std::function<cd(double)>& f, double a, double b,
                 const Options& opt = {});

// As above but never throws; caller inspects Result::error.
Result integrate_noexcept(const std::function<cd(double)>& f, double a, double b,
                          const Options& opt = {});

// Trapezoidal rule on a sample grid (the spec's rule for sample-based metrics).
double trapezoid(const std::vector<double>& y, const std::vector<double>& x);

// Neville polynomial extrapolation of (x_i, y_i) to x = 0; err ~ last correction.
cd neville_zero(const std::vector<double>& xs, const std::vector<cd>& ys,
                double* err = nullptr);

} // namespace udw::quad
