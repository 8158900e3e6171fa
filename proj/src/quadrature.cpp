#include "udw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "udw/errors.hpp"

namespace udw::quad {
namespace {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    cd value;
    double error;
    bool operator<(const Segment& o) const {
        return error < o.error || (error == o.error && a < o.a);
    }
};

Segment gk15(const std::function<cd(double)>& f, double a, double b, long& evals) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    cd fc = f(c);
    cd kron = wgk[7] * fc;
    cd gauss = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        cd fl = f(c - dx), fr = f(c + dx);
        kron += wgk[j] * (fl + fr);
        if (j % 2 == 1) gauss += wg[j / 2] * (fl + fr);
    }
    evals += 15;
    kron *= h;
    gauss *= h;
    double err = std::abs(kron - gauss);
    // QUADPACK-style sharpening of the raw difference
    if (err > 0.0) err = std::min(err, 200.0 * err * std::sqrt(err / (std::abs(kron) + 1e-300)));
    return {a, b, kron, err};
}

Result run(const std::function<cd(double)>& f, double a, double b, const Options& opt,
           bool may_throw) {
    Result res;
    if (a == b) return res;

    std::vector<double> cuts{a, b};
    for (double p : opt.break_points)
        if (p > a && p < b) cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::multiset<Segment> segs;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        int n = 1;
        if (opt.max_panel > 0.0) n = std::max(1, (int)std::ceil((hi - lo) / opt.max_panel));
        for (int k = 0; k < n; ++k) {
            double s0 = lo + (hi - lo) * k / n;
            double s1 = lo + (hi - lo) * (k + 1) / n;
            segs.insert(gk15(f, s0, s1, res.evaluations));
        }
    }

    auto total = [&] {
        cd v = 0.0;
        double e = 0.0;
        for (const auto& s : segs) { v += s.value; e += s.error; }
        return std::pair<cd, double>(v, e);
    };

    while ((int)segs.size() < opt.max_segments) {
        auto [v, e] = total();
        if (e <= opt.abs_tol + opt.rel_tol * std::abs(v)) {
            res.value = v;
            res.error = e;
            return res;
        }
        auto worst = std::prev(segs.end());
        Segment s = *worst;
        segs.erase(worst);
        double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) { // interval exhausted at double resolution
            s.error = 0.0;
            segs.insert(s);
            continue;
        }
        segs.insert(gk15(f, s.a, m, res.evaluations));
        segs.insert(gk15(f, m, s.b, res.evaluations));
    }
    auto [v, e] = total();
    res.value = v;
    res.error = e;
    if (may_throw && e > opt.abs_tol + opt.rel_tol * std::abs(v) * 10.0)
        throw numerical_error("adaptive quadrature did not converge", e);
    return res;
}

} // namespace

Result integrate(const std::function<cd(double)>& f, double a, double b, const Options& opt) {
    return run(f, a, b, opt, true);
}

Result integrate_noexcept(const std::function<cd(double)>& f, double a, double b,
                          const Options& opt) {
    return run(f, a, b, opt, false);
}

double trapezoid(const std::vector<double>& y, const std::vector<double>& x) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

cd neville_zero(const std::vector<double>& xs, const std::vector<cd>& ys, double* err) {
    std::vector<cd> y = ys;
    const size_t n = y.size();
    if (n == 0) throw std::invalid_argument("neville_zero: empty data");
    cd last = y[0];
    double e = 0.0;
    for (size_t k = 1; k < n; ++k) {
        for (size_t i = 0; i + k < n; ++i)
            y[i] = y[i + 1] + (y[i] - y[i + 1]) * xs[i + k] / (xs[i + k] - xs[i]);
        e = std::abs(y[0] - last);
        last = y[0];
    }
    if (err) *err = e;
    return y[0];
}

} // namespace udw::quad
