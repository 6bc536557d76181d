#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcert/model.hpp"
#include "qcert/spectral.hpp"

namespace qcert {

// Expected charge-measurement distribution of one target state at one tilt,
// aligned with a shared ChargeConfigTable.
struct ExpectedDistributions {
    std::vector<std::string> targets;                      // "S1", "T1", ...
    std::vector<double> candidate_tilts;
    // dist[target][tilt] over configs
    std::vector<std::vector<Eigen::VectorXd>> dist;
    ChargeConfigTable configs;
};

// Eigenstate-based expectations on a candidate grid: adiabatically tracked
// states (spin rank 1) are rounded to their dominant configuration, higher
// states keep their full configuration distribution.
ExpectedDistributions eigenstate_expectations(const Geometry& geometry, const ModelParams& params,
                                              const BasisSector& sector,
                                              const std::vector<std::string>& targets,
                                              const std::vector<double>& candidate_tilts,
                                              const LowSpectrumOptions& solver);

struct CertificationPlan {
    std::vector<double> tilts;                 // ordered as measured
    std::vector<std::string> targets;
    std::vector<std::vector<Eigen::VectorXd>> expected;  // [target][tilt] over configs
    ChargeConfigTable configs;
    double kl_threshold = 1.0;
    double kl_floor = 1e-12;
    double support_floor = 1e-6;
    bool complete = false;
    std::vector<std::pair<std::string, std::string>> unresolved_pairs;
};

// Greedy-minimal tilt set separating every target pair by at least
// `threshold` in both KL directions. When no candidate set separates all
// pairs, the plan carries the unresolved pairs and complete=false.
CertificationPlan plan_tilts(const ExpectedDistributions& expectations, double threshold = 1.0);

// True when some single candidate tilt separates every pair (exhaustive scan).
bool single_tilt_suffices(const ExpectedDistributions& expectations, double threshold = 1.0);

enum class Classification { Label, Ambiguous, Unrecognized };
struct ClassifyResult {
    Classification kind = Classification::Ambiguous;
    std::string label;  // set when kind == Label
};

// Walks the plan tilt by tilt, keeping targets whose expected support contains
// the measured configuration; stops early once a single target remains.
ClassifyResult classify_outcome(const std::vector<std::vector<int>>& outcomes,
                                const CertificationPlan& plan);

struct ConfusionMatrix {
    std::vector<std::string> targets;
    Eigen::MatrixXi counts;  // rows: true state; cols: targets + ambiguous + unrecognized
    int ambiguous_col() const { return int(targets.size()); }
    int unrecognized_col() const { return int(targets.size()) + 1; }
};

// Monte Carlo of the measurement protocol: per trial, M shots per tilt are
// drawn from the true distribution, reduced to the modal configuration, and
// classified through the plan. Deterministic for a fixed seed.
ConfusionMatrix simulate_protocol(const CertificationPlan& plan,
                                  const std::vector<std::vector<Eigen::VectorXd>>& true_dist,
                                  int shots_per_tilt, int trials, uint64_t seed);

// Singlet-triplet mixing rate A^2 / (E_T1 - E_S1).
double hyperfine_mixing_rate(double hyperfine_coupling, double gap);

// Structured plan file (JSON) and confusion-matrix CSV.
void write_plan_json(const CertificationPlan& plan, const std::string& path,
                     const std::string& metadata_comment);
void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path,
                         const std::string& metadata);

}  // namespace qcert
