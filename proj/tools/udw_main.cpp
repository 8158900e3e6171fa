// Unruh-DeWitt detector duality toolkit: dual switchings, excitation
// probabilities, entanglement harvesting, and canned experiment sweeps.
//
// All user-facing parameters are dimensionless combinations (OmegaT, d/T,
// sigma/T, eps/T); the internal timescale T is 1.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udw/detector.hpp"
#include "udw/errors.hpp"
#include "udw/experiments.hpp"
#include "udw/field.hpp"
#include "udw/harvesting.hpp"
#include "udw/switching.hpp"
#include "udw/verify.hpp"

namespace {

using udw::format_double;

udw::SwitchingKind parse_kind(const std::string& s) {
    if (s == "gaussian") return udw::SwitchingKind::Gaussian;
    if (s == "compact-cosine" || s == "cosine") return udw::SwitchingKind::CompactCosine;
    if (s == "compact-cosine-sq" || s == "cosine-sq")
        return udw::SwitchingKind::CompactCosineSq;
    throw CLI::ValidationError("--kind", "unknown switching kind '" + s + "'");
}

udw::FieldModel parse_field(const std::string& s, double eps_over_t, double T,
                            double cavity_len, int cavity_modes) {
    if (s == "minkowski") return udw::FieldModel{udw::MinkowskiVacuum{0.0, eps_over_t * T}};
    if (s == "cavity")
        return udw::FieldModel{udw::FiniteModeCavity{cavity_len, cavity_modes}};
    throw CLI::ValidationError("--field", "unknown field '" + s + "'");
}

std::vector<double> parse_grid(const std::string& s) {
    // "lo:hi:n"
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw CLI::ValidationError("--grid", "expected lo:hi:n");
    const double lo = std::stod(s.substr(0, c1));
    const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const int n = std::stoi(s.substr(c2 + 1));
    if (!(hi > lo) || n < 2) throw CLI::ValidationError("--grid", "need hi > lo and n >= 2");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw CLI::ValidationError("--out", "cannot open " + path);
    return file;
}

int run_dual(const std::string& kind, double T, double omega_t, const std::string& grid_spec,
             const std::string& out_path) {
    udw::SwitchingSpec spec(parse_kind(kind), T);
    std::vector<double> grid =
        grid_spec.empty() ? spec.default_grid() : parse_grid(grid_spec);
    const double omega = omega_t / T;
    const udw::DualSwitching dual = udw::dual_switching(spec, omega, grid);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os << "# udw " << UDW_VERSION << " dual switching; kind=" << kind << " T=" << T
       << " omegaT=" << omega_t << "\n";
    os << "tau,chi,omega_chi_tilde,theta\n";
    for (size_t i = 0; i < grid.size(); ++i)
        os << format_double(grid[i]) << "," << format_double(eval_switching(spec, grid[i]))
           << "," << format_double(omega * dual.chi_tilde[i]) << ","
           << format_double(dual.theta[i]) << "\n";
    return 0;
}

int run_single(const std::string& kind, double T, double omega_t, const std::string& field_s,
               double eps_over_t, double cavity_len, int cavity_modes, double position,
               double lambda, double sigma, const std::string& out_path) {
    udw::SwitchingSpec spec(parse_kind(kind), T);
    const double omega = omega_t / T;
    const udw::FieldModel field =
        parse_field(field_s, eps_over_t, T, cavity_len, cavity_modes);

    udw::DetectorConfig amp;
    amp.gap = omega;
    amp.coupling = lambda;
    amp.switching = spec;
    amp.position = {position, 0, 0};
    if (sigma > 0.0) amp.smearing = udw::GaussianBall{sigma * T};

    udw::DetectorConfig der = amp;
    der.coupling = lambda / omega;
    der.coupling_kind = udw::CouplingKind::Derivative;

    udw::RouteDiagnostics diag_amp, diag_der;
    const double L = udw::excitation_probability(amp, field, {}, &diag_amp);
    const double Lt = udw::excitation_probability_derivative(der, field, {}, &diag_der);
    const double residual = std::abs(L - Lt) / L;

    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os << "# udw " << UDW_VERSION << " single-detector probabilities; chi~ = chi/Omega\n";
    os << "quantity,value\n";
    os << "l_amplitude," << format_double(L) << "\n";
    os << "l_derivative," << format_double(Lt) << "\n";
    os << "residual," << format_double(residual) << "\n";
    os << "route_rel_diff_amplitude," << format_double(diag_amp.rel_difference) << "\n";
    os << "route_rel_diff_derivative," << format_double(diag_der.rel_difference) << "\n";
    return 0;
}

int run_harvest(const std::string& kind, double T, double omega_t, const std::string& field_s,
                double eps_over_t, double cavity_len, int cavity_modes, double separation,
                double delay, double lambda, double sigma, const std::string& coupling,
                double pos_a, const std::string& out_path) {
    udw::SwitchingSpec spec_a(parse_kind(kind), T);
    udw::SwitchingSpec spec_b = spec_a;
    spec_b.center = delay * T;
    const double omega = omega_t / T;
    const udw::FieldModel field =
        parse_field(field_s, eps_over_t, T, cavity_len, cavity_modes);

    udw::DetectorPair pair;
    pair.a.gap = omega;
    pair.a.coupling = lambda;
    pair.a.switching = spec_a;
    pair.b = pair.a;
    pair.b.switching = spec_b;
    if (field.is_minkowski()) {
        pair.a.position = {0, 0, 0};
        pair.b.position = {separation * T, 0, 0};
        if (sigma > 0.0) {
            pair.a.smearing = udw::GaussianBall{sigma * T};
            pair.b.smearing = udw::GaussianBall{sigma * T};
        }
    } else {
        pair.a.position = {pos_a, 0, 0};
        pair.b.position = {pos_a + separation * T, 0, 0};
    }

    udw::CouplingKind ck = udw::CouplingKind::Amplitude;
    if (coupling == "derivative") {
        ck = udw::CouplingKind::Derivative;
        pair.a.coupling /= omega;
        pair.b.coupling /= omega;
    } else if (coupling != "amplitude") {
        throw CLI::ValidationError("--coupling", "amplitude|derivative");
    }

    const udw::HarvestResult h = udw::harvest(pair, field, ck);
    double margin = 0.0;
    const bool spacelike = udw::spacelike_certified(pair, &margin);

    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os << "# udw " << UDW_VERSION << " two-detector harvesting\n";
    os << "quantity,value\n";
    os << "l_aa," << format_double(h.l_aa) << "\n";
    os << "l_bb," << format_double(h.l_bb) << "\n";
    os << "l_ab_re," << format_double(h.l_ab.real()) << "\n";
    os << "l_ab_im," << format_double(h.l_ab.imag()) << "\n";
    os << "m_re," << format_double(h.m.real()) << "\n";
    os << "m_im," << format_double(h.m.imag()) << "\n";
    os << "v_score," << format_double(h.v_score) << "\n";
    os << "negativity," << format_double(h.negativity) << "\n";
    os << "spacelike_certified," << (spacelike ? 1 : 0) << "\n";
    os << "spacelike_margin," << format_double(margin) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unruh-DeWitt detector duality toolkit"};
    app.set_config("--config", "", "config file with key = value lines ('#' comments)");
    app.require_subcommand(1);

    // shared option storage
    std::string kind = "gaussian", field_s = "minkowski", out_path, grid_spec;
    double T = 1.0, omega_t = 10.0, eps_over_t = 1e-3, cavity_len = 4.0;
    int cavity_modes = 5, jobs = 1;
    double separation = 2.0, delay = 0.0, lambda = 0.1, sigma = 0.0, position = 0.0;
    double pos_a = 1.3;

    auto add_common = [&](CLI::App* cmd, bool with_field) {
        cmd->add_option("--kind", kind,
                        "switching kind: gaussian|compact-cosine|compact-cosine-sq");
        cmd->add_option("--T", T, "interaction timescale T (time units; default 1)");
        cmd->add_option("--omegaT", omega_t, "dimensionless gap Omega*T");
        cmd->add_option("--out", out_path, "output CSV path ('-' = stdout)");
        if (with_field) {
            cmd->add_option("--field", field_s, "field model: minkowski|cavity");
            cmd->add_option("--epsT", eps_over_t, "regulator eps/T (Minkowski)");
            cmd->add_option("--cavity-length", cavity_len, "cavity length (units of T)");
            cmd->add_option("--cavity-modes", cavity_modes, "cavity mode count");
            cmd->add_option("--lambda", lambda, "coupling constant (dimensionless)");
            cmd->add_option("--sigma", sigma, "Gaussian smearing width sigma/T (0 = pointlike)");
        }
    };

    CLI::App* dual = app.add_subcommand("dual", "emit (tau, chi, Omega chi~, theta) CSV");
    add_common(dual, false);
    dual->add_option("--grid", grid_spec, "tau grid lo:hi:n (units of T; default per kind)");

    CLI::App* single =
        app.add_subcommand("single", "single-detector L, L~ (chi/Omega) and residual");
    add_common(single, true);
    single->add_option("--position", position, "detector position (cavity: in (0,L))");

    CLI::App* harvest = app.add_subcommand("harvest", "two-detector harvesting quantities");
    add_common(harvest, true);
    harvest->add_option("--separation", separation, "detector separation d/T");
    harvest->add_option("--delay", delay, "switching delay of detector B (units of T)");
    harvest->add_option("--position-a", pos_a, "cavity position of detector A");
    std::string coupling = "amplitude";
    harvest->add_option("--coupling", coupling, "amplitude|derivative (chi/Omega twin)");

    CLI::App* sweep = app.add_subcommand("sweep", "run a canned experiment sweep");
    std::string experiment = "distance-table", sweep_field = "cavity", reference_path;
    std::vector<double> sweep_omegas, sweep_seps;
    sweep->add_option("--experiment", experiment,
                      "gaussian-convergence|compact-convergence|smooth-compact-convergence|"
                      "distance-table|single-duality|pair-duality|phase-check");
    sweep->add_option("--omegaT", sweep_omegas, "OmegaT grid (defaults per experiment)");
    sweep->add_option("--separation", sweep_seps, "separations d/T (pair-duality)");
    sweep->add_option("--field", sweep_field, "field for duality sweeps: cavity|minkowski");
    sweep->add_option("--out", out_path, "output CSV path ('-' = stdout)");
    sweep->add_option("--reference", reference_path,
                      "tolerance reference file; when given, checks and sets exit status");
    sweep->add_option("--jobs", jobs,
                      "worker threads (UDW_JOBS fallback); output order is deterministic");

    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> criteria;
    verify->add_option("--criteria", criteria, "subset of criteria 1..8 (default all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    if (jobs == 1) {
        if (const char* env = std::getenv("UDW_JOBS")) jobs = std::max(1, std::atoi(env));
    }

    try {
        if (app.got_subcommand(dual)) return run_dual(kind, T, omega_t, grid_spec, out_path);
        if (app.got_subcommand(single))
            return run_single(kind, T, omega_t, field_s, eps_over_t, cavity_len,
                              cavity_modes, field_s == "cavity" && position == 0.0 ? 1.3
                                                                                   : position,
                              lambda, sigma, out_path);
        if (app.got_subcommand(harvest))
            return run_harvest(kind, T, omega_t, field_s, eps_over_t, cavity_len,
                               cavity_modes, separation, delay, lambda, sigma, coupling,
                               pos_a, out_path);
        if (app.got_subcommand(sweep)) {
            udw::SweepSpec spec;
            const auto id = udw::experiment_from_string(experiment);
            if (!id) throw CLI::ValidationError("--experiment", "unknown experiment");
            spec.id = *id;
            spec.omega_t = sweep_omegas;
            spec.separations = sweep_seps;
            spec.field = sweep_field;
            spec.jobs = jobs;
            const udw::SweepResult result = udw::run_experiment(spec);
            std::ofstream file;
            std::ostream& os = open_output(file, out_path);
            udw::write_csv(result, os);
            if (!reference_path.empty()) {
                const udw::ReferenceReport rep =
                    udw::compare_to_reference(result, reference_path);
                for (const auto& chk : rep.checks)
                    std::cerr << (chk.pass ? "[PASS] " : "[FAIL] ") << chk.key << " = "
                              << format_double(chk.value) << " (expected ["
                              << format_double(chk.lo) << ", " << format_double(chk.hi)
                              << "])\n";
                return rep.all_pass ? 0 : 1;
            }
            return 0;
        }
        if (app.got_subcommand(verify)) {
            const auto results = udw::run_acceptance(criteria, std::cout);
            return udw::acceptance_exit_code(results);
        }
    } catch (const udw::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (error estimate " << e.error_estimate() << ")\n";
        return 3;
    } catch (const udw::cross_validation_error& e) {
        std::cerr << "cross-validation failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
