#include "udw/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "udw/detector.hpp"
#include "udw/errors.hpp"
#include "udw/field.hpp"
#include "udw/harvesting.hpp"
#include "udw/switching.hpp"

namespace udw {
namespace {

const std::map<std::string, ExperimentId> kNames = {
    {"gaussian-convergence", ExperimentId::GaussianConvergence},
    {"compact-convergence", ExperimentId::CompactConvergence},
    {"smooth-compact-convergence", ExperimentId::SmoothCompactConvergence},
    {"distance-table", ExperimentId::DistanceTable},
    {"single-duality", ExperimentId::SingleDuality},
    {"pair-duality", ExperimentId::PairDuality},
    {"phase-check", ExperimentId::PhaseCheck},
};

FieldModel make_field(const std::string& name) {
    if (name == "minkowski") return FieldModel{MinkowskiVacuum{0.0, 1e-3}};
    if (name == "cavity") return FieldModel{FiniteModeCavity{4.0, 5}};
    throw std::invalid_argument("unknown field '" + name + "' (minkowski|cavity)");
}

std::string meta_line(const std::string& k, const std::string& v) {
    return "# " + k + ": " + v;
}

std::vector<std::string> standard_meta(const SweepSpec& spec) {
    std::vector<std::string> m;
    m.push_back(meta_line("generator", "udw " UDW_VERSION));
    m.push_back(meta_line("experiment", to_string(spec.id)));
    m.push_back(meta_line("eps-schedule-w", "1e-2 1e-3 1e-4 (units of T)"));
    m.push_back(meta_line("eps-schedule-wdd", "3e-2 1e-2 3e-3 1e-3 (units of T)"));
    return m;
}

void convergence_rows(SweepResult& out, SwitchingKind kind,
                      const std::vector<double>& omegas) {
    SwitchingSpec spec(kind, 1.0);
    const std::vector<double> grid = spec.default_grid();
    out.columns = {"omega_t", "tau_over_t", "chi", "omega_chi_tilde"};
    for (double om : omegas) {
        const DualSwitching dual = dual_switching(spec, om, grid);
        for (size_t i = 0; i < grid.size(); ++i) {
            SweepRow r;
            r.values = {{"omega_t", om},
                        {"tau_over_t", grid[i]},
                        {"chi", eval_switching(spec, grid[i])},
                        {"omega_chi_tilde", om * dual.chi_tilde[i]}};
            out.rows.push_back(std::move(r));
        }
    }
}

std::string kind_name(SwitchingKind k) {
    switch (k) {
        case SwitchingKind::Gaussian: return "gaussian";
        case SwitchingKind::CompactCosine: return "compact-cosine";
        case SwitchingKind::CompactCosineSq: return "compact-cosine-sq";
        case SwitchingKind::Tabulated: return "tabulated";
    }
    return "?";
}

void distance_rows(SweepResult& out, const std::vector<double>& omegas) {
    out.columns = {"kind", "omega_t", "l1_relative", "area_difference"};
    int kind_idx = 0;
    for (SwitchingKind kind : {SwitchingKind::Gaussian, SwitchingKind::CompactCosine,
                               SwitchingKind::CompactCosineSq}) {
        SwitchingSpec spec(kind, 1.0);
        const std::vector<double> grid = spec.default_grid();
        std::vector<double> chi(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) chi[i] = eval_switching(spec, grid[i]);
        for (double om : omegas) {
            const DualSwitching dual = dual_switching(spec, om, grid);
            std::vector<double> scaled(grid.size());
            for (size_t i = 0; i < grid.size(); ++i) scaled[i] = om * dual.chi_tilde[i];
            const double l1 = l1_relative_distance(scaled, chi, grid);
            const double ad = relative_area_difference(scaled, chi, grid);
            SweepRow r;
            r.values = {{"kind", double(kind_idx)},
                        {"omega_t", om},
                        {"l1_relative", l1},
                        {"area_difference", ad}};
            out.rows.push_back(std::move(r));
            const std::string base =
                "distance." + kind_name(kind) + ".omega" + format_double(om);
            out.named.emplace_back(base + ".l1", l1);
            out.named.emplace_back(base + ".area", ad);
        }
        ++kind_idx;
    }
}

void single_duality_rows(SweepResult& out, const SweepSpec& spec) {
    const FieldModel field = make_field(spec.field);
    std::vector<double> omegas = spec.omega_t;
    if (omegas.empty()) omegas = {1.0, 2.0, 5.0, 10.0};
    out.columns = {"omega_t", "l_amplitude", "l_derivative", "residual"};
    const std::array<double, 3> pos =
        field.is_minkowski() ? std::array<double, 3>{0, 0, 0}
                             : std::array<double, 3>{1.3, 0, 0};
    SwitchingSpec sw(SwitchingKind::Gaussian, 1.0);
    for (double om : omegas) {
        DetectorConfig amp;
        amp.gap = om;
        amp.switching = sw;
        amp.position = pos;
        DetectorConfig der = amp;
        der.coupling = 1.0 / om;
        der.coupling_kind = CouplingKind::Derivative;
        const double L = excitation_probability(amp, field);
        const double Lt = excitation_probability_derivative(der, field);
        const double resid = std::abs(L - Lt) / L;
        SweepRow r;
        r.values = {{"omega_t", om}, {"l_amplitude", L}, {"l_derivative", Lt},
                    {"residual", resid}};
        out.rows.push_back(std::move(r));
        out.named.emplace_back("single." + spec.field + ".omega" + format_double(om) +
                                   ".residual", resid);
    }
}

void pair_duality_rows(SweepResult& out, const SweepSpec& spec) {
    const FieldModel field = make_field(spec.field);
    std::vector<double> omegas = spec.omega_t;
    if (omegas.empty()) omegas = {2.0, 5.0};
    std::vector<double> seps = spec.separations;
    if (seps.empty()) seps = {1.0};
    out.columns = {"omega_t", "separation", "dl_aa", "dl_bb", "dm", "dnegativity"};
    for (double om : omegas) {
        for (double d : seps) {
            DetectorPair pair;
            pair.a.gap = om;
            pair.a.switching = SwitchingSpec(SwitchingKind::Gaussian, 1.0);
            pair.b = pair.a;
            if (field.is_minkowski()) {
                pair.a.position = {0, 0, 0};
                pair.b.position = {d, 0, 0};
            } else {
                pair.a.position = {1.3, 0, 0};
                pair.b.position = {std::min(1.3 + d, 0.95 * field.cavity().length), 0, 0};
            }
            const PairDualityResidual r = pair_duality_residual(pair, field);
            SweepRow row;
            row.values = {{"omega_t", om},     {"separation", d}, {"dl_aa", r.dl_aa},
                          {"dl_bb", r.dl_bb},  {"dm", r.dm},      {"dnegativity", r.dnegativity}};
            out.rows.push_back(std::move(row));
        }
    }
}

void phase_rows(SweepResult& out, const SweepSpec& spec) {
    std::vector<double> omegas = spec.omega_t;
    if (omegas.empty()) omegas = {1.0, 5.0, 10.0, 20.0};
    out.columns = {"omega_t", "residual", "best_fit_constant", "offset_from_half_pi"};
    SwitchingSpec sw(SwitchingKind::Gaussian, 1.0);
    const std::vector<double> grid = sw.default_grid();
    for (double om : omegas) {
        const PhaseFit fit = phase_linearity_residual(dual_switching(sw, om, grid));
        SweepRow r;
        r.values = {{"omega_t", om},
                    {"residual", fit.residual},
                    {"best_fit_constant", fit.constant},
                    {"offset_from_half_pi", phase_constant_offset(fit.constant)}};
        out.rows.push_back(std::move(r));
        out.named.emplace_back("phase.omega" + format_double(om) + ".offset",
                               phase_constant_offset(fit.constant));
    }
}

} // namespace

std::string to_string(ExperimentId id) {
    for (const auto& [name, v] : kNames)
        if (v == id) return name;
    return "?";
}

std::optional<ExperimentId> experiment_from_string(const std::string& name) {
    auto it = kNames.find(name);
    if (it == kNames.end()) return std::nullopt;
    return it->second;
}

SweepResult run_experiment(const SweepSpec& spec) {
    SweepResult out;
    out.meta = standard_meta(spec);
    switch (spec.id) {
        case ExperimentId::GaussianConvergence:
            convergence_rows(out, SwitchingKind::Gaussian,
                             spec.omega_t.empty() ? std::vector<double>{1, 5, 10, 20}
                                                  : spec.omega_t);
            break;
        case ExperimentId::CompactConvergence:
            convergence_rows(out, SwitchingKind::CompactCosine,
                             spec.omega_t.empty() ? std::vector<double>{10, 100, 1000}
                                                  : spec.omega_t);
            break;
        case ExperimentId::SmoothCompactConvergence:
            convergence_rows(out, SwitchingKind::CompactCosineSq,
                             spec.omega_t.empty() ? std::vector<double>{10, 50, 100}
                                                  : spec.omega_t);
            break;
        case ExperimentId::DistanceTable:
            distance_rows(out, spec.omega_t.empty() ? std::vector<double>{5, 10, 20, 40}
                                                    : spec.omega_t);
            break;
        case ExperimentId::SingleDuality: single_duality_rows(out, spec); break;
        case ExperimentId::PairDuality: pair_duality_rows(out, spec); break;
        case ExperimentId::PhaseCheck: phase_rows(out, spec); break;
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

void write_csv(const SweepResult& result, std::ostream& os) {
    for (const auto& m : result.meta) os << m << "\n";
    for (size_t i = 0; i < result.columns.size(); ++i)
        os << (i ? "," : "") << result.columns[i];
    os << "\n";
    for (const auto& row : result.rows) {
        for (size_t i = 0; i < row.values.size(); ++i)
            os << (i ? "," : "") << format_double(row.values[i].second);
        os << "\n";
    }
}

ReferenceReport compare_to_reference(const SweepResult& result,
                                     const std::string& reference_path) {
    std::ifstream in(reference_path);
    if (!in) throw std::invalid_argument("cannot open reference file " + reference_path);
    std::map<std::string, std::pair<double, double>> ref;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key, eq;
        double lo, hi;
        if (ss >> key >> eq >> lo >> hi && eq == "=") ref[key] = {lo, hi};
    }
    if (result.named.empty())
        throw std::invalid_argument("experiment produced no reference-checkable values");
    ReferenceReport rep;
    for (const auto& [key, value] : result.named) {
        auto it = ref.find(key);
        if (it == ref.end()) continue;
        ReferenceCheck c;
        c.key = key;
        c.value = value;
        c.lo = it->second.first;
        c.hi = it->second.second;
        c.pass = value >= c.lo && value <= c.hi;
        rep.all_pass = rep.all_pass && c.pass;
        rep.checks.push_back(c);
    }
    return rep;
}

} // namespace udw
