#include "udw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "udw/detector.hpp"
#include "udw/errors.hpp"
#include "udw/experiments.hpp"
#include "udw/field.hpp"
#include "udw/harvesting.hpp"
#include "udw/quadrature.hpp"
#include "udw/switching.hpp"

namespace udw {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::string fmt(double x) { return format_double(x); }

struct Check {
    std::vector<std::string> lines;
    bool ok = true;
    void require(bool cond, const std::string& what) {
        ok = ok && cond;
        lines.push_back(std::string(cond ? "  ok   " : "  FAIL ") + what);
    }
    void note(const std::string& what) { lines.push_back("       " + what); }
};

// commutator-null positions for the standard 5-mode test cavities (see tests)
constexpr double kCavityLen = 4.0;
constexpr int kCavityModes = 5;
constexpr double kNullXA = 1.3;
constexpr double kNullXB = 2.637699535433;

// ---- criterion 1: distance reproduction ------------------------------------
Check criterion1() {
    Check c;
    SwitchingSpec spec(SwitchingKind::Gaussian, 1.0);
    const std::vector<double> grid = spec.default_grid();
    std::vector<double> chi(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) chi[i] = eval_switching(spec, grid[i]);
    for (auto [om, target, tol] : {std::tuple{5.0, 0.021, 0.004}, {10.0, 0.005, 0.002}}) {
        const DualSwitching d = dual_switching(spec, om, grid);
        std::vector<double> scaled(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) scaled[i] = om * d.chi_tilde[i];
        const double area = relative_area_difference(scaled, chi, grid);
        const double l1 = l1_relative_distance(scaled, chi, grid);
        c.require(std::abs(area - target) <= tol,
                  "relative area difference at OmegaT=" + fmt(om) + " is " + fmt(area) +
                      " (target " + fmt(target) + " +- " + fmt(tol) + ")");
        c.note("strict L1 relative distance at OmegaT=" + fmt(om) + " is " + fmt(l1));
    }
    return c;
}

// ---- criterion 2: large-gap residual convergence ----------------------------
Check criterion2() {
    Check c;
    SwitchingSpec spec(SwitchingKind::Gaussian, 1.0);
    const std::vector<double> grid = spec.default_grid();
    std::vector<double> res;
    for (double om : {5.0, 10.0, 20.0, 40.0, 80.0})
        res.push_back(large_gap_residual(spec, om, grid));
    bool decreasing = true;
    for (size_t i = 0; i + 1 < res.size(); ++i) decreasing = decreasing && res[i + 1] < res[i];
    c.require(decreasing, "residual strictly decreases along OmegaT in {5,10,20,40,80}");
    std::string seq;
    for (double r : res) seq += fmt(r) + " ";
    c.note("residuals: " + seq);
    c.require(res.back() < 0.01 * res.front(),
              "final residual " + fmt(res.back()) + " < 1% of the OmegaT=5 value " +
                  fmt(res.front()) + " (ratio " + fmt(res.back() / res.front()) + ")");
    c.note("final residual / sup(chi) = " + fmt(res.back() * std::sqrt(2.0 * kPi)));
    return c;
}

// ---- criterion 3: compact-support slow convergence ---------------------------
Check criterion3() {
    Check c;
    SwitchingSpec spec(SwitchingKind::CompactCosine, 1.0);
    auto tail_sup = [&](double om) {
        double sup = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double tau = 0.5 + 1e-9 + (3.0 - 0.5 - 1e-9) * i / 2000.0;
            sup = std::max(sup, om * std::abs(lower_incomplete_fourier(spec, om, tau)));
        }
        return sup;
    };
    const double sup_chi = 0.5 * kPi;
    const double s100 = tail_sup(100.0);
    const double s1000 = tail_sup(1000.0);
    c.require(s100 > 0.02 * sup_chi, "sup over (T/2,3T] of Omega chi~_C at OmegaT=100 is " +
                                         fmt(s100) + " > 0.02 sup(chi_C) = " +
                                         fmt(0.02 * sup_chi));
    c.require(s1000 < 0.2 * s100, "OmegaT=1000 tail sup " + fmt(s1000) +
                                      " < one fifth of the OmegaT=100 value (" +
                                      fmt(0.2 * s100) + ")");
    return c;
}

// ---- criterion 4: exact finite-gap duality on the cavity oracle --------------
Check criterion4() {
    Check c;
    const FieldModel field{FiniteModeCavity{kCavityLen, kCavityModes}};
    SwitchingSpec spec(SwitchingKind::Gaussian, 1.0);
    const double om = 5.0;

    DetectorConfig amp;
    amp.gap = om;
    amp.switching = spec;
    amp.position = {kNullXA, 0, 0};

    DetectorConfig der = amp;
    der.coupling_kind = CouplingKind::Derivative;
    der.switching = dual_switching(spec, om, spec.default_grid());

    const double L = excitation_probability(amp, field);
    const double Lt = excitation_probability_derivative(der, field);
    const double rel = std::abs(L - Lt) / L;
    c.require(rel < 1e-6, "exact-dual L~ matches L to 1e-6 on the 5-mode cavity: L=" +
                              fmt(L) + " L~=" + fmt(Lt) + " rel=" + fmt(rel));
    return c;
}

// ---- criterion 5: large-gap duality in the Minkowski vacuum ------------------
Check criterion5() {
    Check c;
    const FieldModel field{MinkowskiVacuum{}};
    SwitchingSpec spec(SwitchingKind::Gaussian, 1.0);
    std::vector<double> res;
    for (double om : {5.0, 10.0, 20.0})
        res.push_back(coupling_duality_residual(spec, om, field));
    c.note("residuals at OmegaT = 5, 10, 20: " + fmt(res[0]) + " " + fmt(res[1]) + " " +
           fmt(res[2]));
    c.require(res[1] < 0.02, "duality residual at OmegaT=10 is " + fmt(res[1]) + " < 0.02");
    c.require(res[0] > res[1] && res[1] > res[2],
              "residual strictly decreasing over OmegaT in {5,10,20}");
    return c;
}

// ---- criterion 6: two-detector duality and time-ordered consistency ----------
Check criterion6() {
    Check c;
    // (a) cavity: direct vs integrated-by-parts M~ at commutator-null positions
    {
        const FieldModel field{FiniteModeCavity{kCavityLen, kCavityModes}};
        DetectorPair p;
        p.a.gap = 2.0;
        p.a.coupling = 1.0 / 2.0;
        p.a.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
        p.a.coupling_kind = CouplingKind::Derivative;
        p.a.position = {kNullXA, 0, 0};
        p.b = p.a;
        p.b.position = {kNullXB, 0, 0};
        const MDerivative m = m_term_derivative_full(p, field);
        const double rel = std::abs(m.direct - m.by_parts) /
                           std::max(std::abs(m.direct), std::abs(m.by_parts));
        c.require(rel < 1e-6, "cavity: direct and by-parts M~ agree to 1e-6 (rel " +
                                  fmt(rel) + ", remnant estimate " +
                                  fmt(m.remnant_estimate) + ")");
    }
    // (b) Minkowski with eps extrapolation
    {
        const FieldModel field{MinkowskiVacuum{}};
        DetectorPair p;
        p.a.gap = 10.0;
        p.a.coupling = 1.0 / 10.0;
        p.a.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
        p.a.coupling_kind = CouplingKind::Derivative;
        p.a.position = {0, 0, 0};
        p.b = p.a;
        p.b.position = {2.0, 0, 0};
        const MDerivative m = m_term_derivative_full(p, field);
        const double rel = std::abs(m.direct - m.by_parts) /
                           std::max(std::abs(m.direct), std::abs(m.by_parts));
        c.require(rel < 1e-4, "Minkowski: direct and by-parts M~ agree to 1e-4 (rel " +
                                  fmt(rel) + ")");
    }
    // (c) pair duality residuals at OmegaT=10, d=2T
    {
        const FieldModel field{MinkowskiVacuum{}};
        DetectorPair pair;
        pair.a.gap = 10.0;
        pair.a.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
        pair.a.position = {0, 0, 0};
        pair.b = pair.a;
        pair.b.position = {2.0, 0, 0};
        const PairDualityResidual r = pair_duality_residual(pair, field);
        c.note("pair residuals: dl_aa=" + fmt(r.dl_aa) + " dl_bb=" + fmt(r.dl_bb) +
               " dm=" + fmt(r.dm) + " dnegativity=" + fmt(r.dnegativity));
        const bool all = r.dl_aa < 0.05 && r.dl_bb < 0.05 && r.dm < 0.05 &&
                         r.dnegativity < 0.05;
        c.require(all, "all pair duality residuals < 0.05 at OmegaT=10, d=2T");
    }
    return c;
}

// ---- criterion 7: negativity oracle equivalence ------------------------------
Check criterion7() {
    Check c;
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> mag(0.0, 0.05);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double laa = mag(rng), lbb = mag(rng);
        const cd m = std::polar(mag(rng), ph(rng));
        const NegativityResult n = negativity(laa, lbb, m);
        std::array<cd, 16> rho{};
        rho[0] = 1.0 - laa - lbb;
        rho[5] = lbb;
        rho[10] = laa;
        rho[12] = m;
        rho[3] = std::conj(m);
        const double bf = negativity_bruteforce(rho);
        worst = std::max(worst, std::abs(bf - n.negativity));
    }
    c.require(worst < 1e-10, "closed form matches brute-force partial transpose on 1000 "
                             "random matrices (worst " + fmt(worst) + ")");
    // identical-detector reduction
    bool exact = true;
    for (int i = 0; i < 100; ++i) {
        const double l = mag(rng);
        const cd m = std::polar(mag(rng), ph(rng));
        const NegativityResult n = negativity(l, l, m);
        exact = exact && n.negativity == std::max(0.0, std::abs(m) - l);
    }
    c.require(exact, "identical-detector reduction max{0, |M| - L} is exact");
    return c;
}

// ---- criterion 8: numerical hygiene ------------------------------------------
Check criterion8() {
    Check c;
    // (a) dual-route agreement for L
    {
        double worst = 0.0;
        const FieldModel mink{MinkowskiVacuum{}};
        for (SwitchingKind kind : {SwitchingKind::Gaussian, SwitchingKind::CompactCosine,
                                   SwitchingKind::CompactCosineSq}) {
            for (double om : {1.0, 5.0, 10.0}) {
                DetectorConfig det;
                det.gap = om;
                det.switching = SwitchingSpec(kind, 1.0);
                RouteDiagnostics diag;
                excitation_probability(det, mink, {}, &diag);
                worst = std::max(worst, diag.rel_difference);
            }
        }
        const FieldModel cav{FiniteModeCavity{kCavityLen, kCavityModes}};
        for (double om : {1.0, 5.0}) {
            DetectorConfig det;
            det.gap = om;
            det.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
            det.position = {kNullXA, 0, 0};
            RouteDiagnostics diag;
            excitation_probability(det, cav, {}, &diag);
            worst = std::max(worst, diag.rel_difference);
        }
        c.require(worst < 1e-6,
                  "time-domain vs spectral L agree to 1e-6 (worst " + fmt(worst) + ")");
    }
    // (b) wightman_dtau vs central finite differences
    {
        const FieldModel mink{MinkowskiVacuum{0.0, 1e-3}};
        double worst = 0.0;
        const double h = 1e-4;
        for (double dt : {0.5, 1.0, 2.5}) {
            for (double d : {0.0, 0.4, 3.0}) {
                if (std::abs(std::abs(dt) - d) < 0.2) continue; // stay off the lightcone
                Event a{dt, {0, 0, 0}}, b{0.0, {d, 0, 0}};
                const cd exact = wightman_dtau(mink, a, b);
                const cd fd = (wightman(mink, Event{dt + h, a.x}, Event{h, b.x}) -
                               wightman(mink, Event{dt + h, a.x}, Event{-h, b.x}) -
                               wightman(mink, Event{dt - h, a.x}, Event{h, b.x}) +
                               wightman(mink, Event{dt - h, a.x}, Event{-h, b.x})) /
                              (4.0 * h * h);
                worst = std::max(worst, std::abs(exact - fd) / std::abs(exact));
            }
        }
        const FieldModel cav{FiniteModeCavity{kCavityLen, kCavityModes}};
        for (double dt : {0.3, 1.7}) {
            Event a{dt, {1.3, 0, 0}}, b{0.0, {2.6, 0, 0}};
            const cd exact = wightman_dtau(cav, a, b);
            const cd fd = (wightman(cav, Event{dt + h, a.x}, Event{h, b.x}) -
                           wightman(cav, Event{dt + h, a.x}, Event{-h, b.x}) -
                           wightman(cav, Event{dt - h, a.x}, Event{h, b.x}) +
                           wightman(cav, Event{dt - h, a.x}, Event{-h, b.x})) /
                          (4.0 * h * h);
            worst = std::max(worst, std::abs(exact - fd) / std::abs(exact));
        }
        c.require(worst < 1e-6,
                  "analytic W~ matches finite differences to 1e-6 (worst " + fmt(worst) + ")");
    }
    // (c) exact lambda^2 scaling
    {
        const FieldModel mink{MinkowskiVacuum{}};
        DetectorConfig det;
        det.gap = 2.0;
        det.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
        det.coupling = 0.1;
        const double l1 = excitation_probability(det, mink);
        det.coupling = 0.2;
        const double l2 = excitation_probability(det, mink);
        c.require(std::abs(l2 / l1 - 4.0) < 1e-12,
                  "L scales exactly as lambda^2 (ratio " + fmt(l2 / l1) + ")");
    }
    // (d) microcausality remnant after eps extrapolation
    {
        std::vector<double> xs;
        std::vector<cd> ys;
        const double d = 2.0, dt = 0.7; // spacelike
        for (double ef : {1e-2, 1e-3, 1e-4}) {
            const FieldModel mink{MinkowskiVacuum{0.0, ef}};
            xs.push_back(ef);
            ys.push_back(wightman(mink, Event{dt, {0, 0, 0}}, Event{0.0, {d, 0, 0}}) -
                         std::conj(
                             wightman(mink, Event{0.0, {d, 0, 0}}, Event{dt, {0, 0, 0}})));
        }
        const double remnant = std::abs(quad::neville_zero(xs, ys));
        c.require(remnant < 1e-8,
                  "spacelike commutator remnant after extrapolation is " + fmt(remnant));

        const FieldModel mink{MinkowskiVacuum{}};
        DetectorPair p;
        p.a.gap = 5.0;
        p.a.coupling = 0.2;
        p.a.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
        p.a.coupling_kind = CouplingKind::Derivative;
        p.b = p.a;
        p.b.position = {2.0, 0, 0};
        const MDerivative m = m_term_derivative_full(p, mink);
        c.require(m.remnant_estimate < 1e-8, "time-ordered commutator remnant estimate is " +
                                                 fmt(m.remnant_estimate));
    }
    return c;
}

} // namespace

std::array<double, 4> hermitian4_eigenvalues(const std::array<cd, 16>& h) {
    std::array<cd, 16> a = h;
    auto at = [&a](int r, int c) -> cd& { return a[4 * r + c]; };
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += std::norm(at(p, q));
        if (off < 1e-32) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const cd apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = at(p, p).real();
                const double aqq = at(q, q).real();
                const double absz = std::abs(apq);
                const cd phase = apq / absz;
                const double tau = (aqq - app) / (2.0 * absz);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cth = 1.0 / std::sqrt(1.0 + t * t);
                const double sth = t * cth;
                // columns p,q rotate: col_p' = c col_p - s conj(phase) col_q... apply
                // the unitary J with J_pp = c, J_pq = s*phase, J_qp = -s*conj(phase),
                // J_qq = c to both sides (A <- J^H A J).
                for (int r = 0; r < 4; ++r) {
                    const cd arp = at(r, p), arq = at(r, q);
                    at(r, p) = cth * arp - sth * std::conj(phase) * arq;
                    at(r, q) = sth * phase * arp + cth * arq;
                }
                for (int ccol = 0; ccol < 4; ++ccol) {
                    const cd apc = at(p, ccol), aqc = at(q, ccol);
                    at(p, ccol) = cth * apc - sth * phase * aqc;
                    at(q, ccol) = sth * std::conj(phase) * apc + cth * aqc;
                }
            }
        }
    }
    std::array<double, 4> ev{at(0, 0).real(), at(1, 1).real(), at(2, 2).real(),
                             at(3, 3).real()};
    std::sort(ev.begin(), ev.end());
    return ev;
}

double negativity_bruteforce(const std::array<cd, 16>& rho) {
    // partial transpose over the first qubit: indices (a,b),(a',b') -> (a',b),(a,b')
    std::array<cd, 16> pt{};
    auto idx = [](int a, int b) { return 2 * a + b; };
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
                for (int bp = 0; bp < 2; ++bp)
                    pt[4 * idx(a, b) + idx(ap, bp)] = rho[4 * idx(ap, b) + idx(a, bp)];
    const auto ev = hermitian4_eigenvalues(pt);
    double neg = 0.0;
    for (double e : ev)
        if (e < 0.0) neg -= e;
    return neg;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& criteria,
                                            std::ostream& log) {
    struct Item {
        int id;
        const char* name;
        Check (*fn)();
    };
    const Item items[] = {
        {1, "distance reproduction (area difference 2.1% / 0.5%)", criterion1},
        {2, "large-gap residual convergence", criterion2},
        {3, "compact-support slow convergence", criterion3},
        {4, "exact finite-gap duality on the cavity oracle", criterion4},
        {5, "large-gap duality in the Minkowski vacuum (chi/Omega)", criterion5},
        {6, "two-detector duality and time-ordered consistency", criterion6},
        {7, "negativity oracle equivalence", criterion7},
        {8, "numerical hygiene", criterion8},
    };
    std::vector<CriterionResult> out;
    for (const Item& item : items) {
        if (!criteria.empty() &&
            std::find(criteria.begin(), criteria.end(), item.id) == criteria.end())
            continue;
        CriterionResult r;
        r.id = item.id;
        r.name = item.name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Check c = item.fn();
            r.pass = c.ok;
            r.details = c.lines;
        } catch (const std::exception& e) {
            r.pass = false;
            r.details.push_back(std::string("  exception: ") + e.what());
        }
        r.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name
            << "  (" << format_double(r.seconds) << " s)\n";
        for (const auto& line : r.details) log << line << "\n";
        out.push_back(std::move(r));
    }
    return out;
}

int acceptance_exit_code(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return 1;
    return 0;
}

} // namespace udw
