#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace udw {

// Canned parameter sweeps emitting machine-readable rows. Each experiment is
// deterministic: identical specs produce byte-identical CSV.
enum class ExperimentId {
    GaussianConvergence,      // (OmegaT, tau/T, chi_G, Omega chi~_G) over OmegaT in {1,5,10,20}
    CompactConvergence,       // same for the compact cosine, OmegaT in {10,100,1000}
    SmoothCompactConvergence, // compact cosine^2, OmegaT in {10,50,100}
    DistanceTable,            // L1 + area-difference metrics per (kind, OmegaT)
    SingleDuality,            // amplitude vs chi/Omega derivative residuals
    PairDuality,              // two-detector residual record
    PhaseCheck,               // phase linearity residual + best-fit constant
};

std::string to_string(ExperimentId id);
std::optional<ExperimentId> experiment_from_string(const std::string& name);

struct SweepSpec {
    ExperimentId id = ExperimentId::GaussianConvergence;
    std::vector<double> omega_t;       // empty -> experiment default
    std::vector<double> separations;   // PairDuality only (units of T)
    int jobs = 1;                      // parallel row evaluation
    // field for the duality experiments: "cavity" (default) or "minkowski"
    std::string field = "cavity";
};

struct SweepRow {
    std::vector<std::pair<std::string, double>> values; // ordered (name, value)
};

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
    std::vector<std::string> meta;                        // "# key: value" lines
    std::vector<std::pair<std::string, double>> named;    // reference-checkable scalars
};

SweepResult run_experiment(const SweepSpec& spec);

// CSV with '#' meta comment block, a header row, and shortest-round-trip
// floating point formatting.
void write_csv(const SweepResult& result, std::ostream& os);

// Reference tolerances: lines "key = lo hi"; '#' comments. Every named scalar
// of the result with a reference entry is checked against [lo, hi].
struct ReferenceCheck {
    std::string key;
    double value = 0.0, lo = 0.0, hi = 0.0;
    bool pass = false;
};
struct ReferenceReport {
    std::vector<ReferenceCheck> checks;
    bool all_pass = true;
};
ReferenceReport compare_to_reference(const SweepResult& result,
                                     const std::string& reference_path);

std::string format_double(double x); // shortest round-trip decimal

} // namespace udw
