#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "subh/necklace.hpp"
#include "subh/oscillation.hpp"
#include "subh/periodic.hpp"
#include "subh/spectral.hpp"

namespace subh {

inline constexpr const char* kManifestSchemaVersion = "1.0";

/// Everything a run needs, with defaults matching the solver's design
/// constants. Built from a preset, a flat key=value config file, and
/// command-line overrides, in that order.
struct RunConfig {
    // weight
    std::string weight_kind = "sin";  // sin | table
    double weight_freq = 1.0;         // sine cycles per period
    double period = 2.0 * 3.14159265358979323846;
    double mu = 6.0;
    std::vector<double> weight_table;  // t,v pairs, flattened

    // nonlinearity
    std::string g_kind = "polymix";
    std::vector<double> g_params{100.0, 100.0};

    // search
    int k = 1;
    double friction_c = 0.0;
    double tol_integration = 1e-10;
    double tol_newton = 1e-9;
    double tol_dedup = 1e-6;
    double class_delta = 0.05;
    std::optional<double> r_override;
    std::optional<double> R_override;
    std::vector<double> seed_amplitudes;  // empty: derived from the instance scales
    std::vector<double> seed_epsilons{0.02, 0.2};
    std::vector<double> seed_grid_u;  // empty: reuse the amplitude ladder
    std::vector<double> seed_grid_v;  // empty: scaled by amplitude over hump width
    double escape = 1e8;
    int threads = 0;  // 0: hardware concurrency (capped at 8)
    int max_seed_rounds = 3;

    // output
    std::string out_dir;
    double csv_stride = 0.0;  // 0: period/1024
};

/// Builtin reproduction presets: "fig1" (sin(6 pi t), T=1, mu=10, atan 400,
/// k=1) and "fig2" (sin t, T=2 pi, mu=6, polymix 100+100, k=2).
RunConfig preset_config(const std::string& name);

/// Flat key=value text, '#' comments. Unknown keys are an error.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const RunConfig& cfg);

/// Outcome of the kT-periodic search on one instance.
struct SolveOutcome {
    std::vector<PeriodicOrbit> orbits;  ///< accepted, classified, class ids set
    std::vector<PeriodicityClass> classes;
    Thresholds thresholds;
    int seeds_tried = 0;
    int seeds_converged = 0;
    int seeds_blown_up = 0;
    int seeds_retried_truncated = 0;
    int seeds_no_convergence = 0;
    int seeds_singular = 0;
    std::vector<std::string> warnings;
};

/// Full experiment: weight analysis, hypothesis checks, the (q_#) gate,
/// seed sweep + Newton solves, classification, dedup, spectral and
/// oscillation diagnostics, manifest assembly. Deterministic given cfg.
struct RunResult {
    WeightSpec weight;
    Nonlinearity g;
    HypothesisReport hypotheses;
    double mu_sharp_value = 0.0;
    double mean_value_one_period = 0.0;
    bool gate_q_sharp = false;  ///< mean value negative (condition (q_#))
    SolveOutcome solve;
    std::vector<PeriodicOrbit> reference_orbits;  ///< k=1 companions for k >= 2 runs
    std::vector<PeriodicityClass> reference_classes;
    std::vector<double> dirichlet_lambda1;  ///< per positive hump
    std::vector<OscillationReport> oscillation;
    nlohmann::json manifest;
    bool numerical_failure = false;
};

RunResult run_experiment(const RunConfig& cfg);

/// CSV export of one orbit: header "t,u,up", fixed stride, 12 significant
/// digits. Deterministic bytes for identical inputs.
void export_csv(const PeriodicOrbit& orbit, const std::string& path, double stride);

}  // namespace subh
