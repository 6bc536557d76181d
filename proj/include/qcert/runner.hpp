#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcert/model.hpp"

namespace qcert {

enum class ExperimentKind { Spectrum, Sweep, Evolve, Lindblad, Certify };

// Parsed experiment description. One experiment kind per config; the
// kind-specific blocks carry their own parameters.
struct ExperimentConfig {
    // geometry
    Geometry::Kind geometry_kind = Geometry::Kind::Chain;
    int sites = 4;  // chain sites or 2x(cols) ladder columns

    ModelParams params;

    ExperimentKind kind = ExperimentKind::Spectrum;

    // spectrum
    double spectrum_epsilon = 0.0;
    int spectrum_k = 8;

    // sweep
    double eps_start = 0.0;
    double eps_stop = 70.0;
    double eps_step = 0.25;
    int sweep_k = 8;
    double gap_floor = 0.05;

    // evolve
    std::vector<std::string> initial_states = {"S1"};
    double t_max = 2e4;
    double eps_max = 70.0;
    double hold = 0.0;
    double evolve_tol = 1e-8;
    int samples = 500;

    // lindblad
    std::vector<double> gammas = {1e-3};
    double lindblad_tol = 1e-7;
    bool spin_block = true;

    // certify
    std::vector<std::string> targets = {"S1", "T1", "S2", "T2"};
    double kl_threshold = 1.0;
    double candidate_start = 5.0;
    double candidate_stop = 70.0;
    double candidate_step = 0.25;
    bool simulate = false;
    int shots_per_tilt = 100;
    int trials = 100;
    double simulate_gamma = 0.0;

    // shared
    std::string output_dir = "out";
    uint64_t seed = 1;
    int threads = 1;
    double solver_tol = 1e-9;

    std::string raw_json;  // config echo for output metadata
};

// Structural and range checks only; never runs physics. Returns a list of
// human-readable errors naming the offending fields (empty = valid).
std::vector<std::string> validate_config(const ExperimentConfig& config);

// Parses the JSON config file. Throws std::runtime_error with the parse or
// schema problem; unknown keys are rejected to catch typos.
ExperimentConfig load_config(const std::string& path);

// Executes the configured experiment and writes CSV/JSON outputs under
// config.output_dir. Returns the process exit status (0 = success).
int run_config(const ExperimentConfig& config);

}  // namespace qcert
