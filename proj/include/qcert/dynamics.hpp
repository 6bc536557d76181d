#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qcert/model.hpp"
#include "qcert/spectral.hpp"

namespace qcert {

// Linear tilt ramp: eps(tau) = (tau/t_max) * eps_max for tau <= t_max, then
// eps_max. `hold` extends the run past the ramp at constant eps_max.
struct TiltSchedule {
    double t_max = 2e4;
    double eps_max = 70.0;
    double hold = 0.0;

    double total_time() const { return t_max + hold; }
    double epsilon_at(double tau) const {
        if (tau <= 0.0) return 0.0;
        if (tau >= t_max) return eps_max;
        return (tau / t_max) * eps_max;
    }
};

struct IntegratorOptions {
    double tol = 1e-8;        // local error per step
    double max_step = 100.0;
    double min_step = 1e-10;  // below this the stepper reports failure
    int dense_threshold = 2000;
};

struct PropagationFailure : std::runtime_error {
    PropagationFailure(const std::string& msg, double tau)
        : std::runtime_error(msg), time_reached(tau) {}
    double time_reached;
};

// Sampled Schrodinger trajectory. `fidelities` is filled when a tracked label
// is supplied; -1 marks unset entries.
struct StateTrajectory {
    std::vector<double> times;
    std::vector<double> epsilons;
    std::vector<Eigen::VectorXcd> states;          // unit norm
    std::vector<Eigen::VectorXd> charge_profiles;
    std::vector<double> fidelities;

    int sample_count() const { return int(times.size()); }
};

struct SpinRankLabel {
    int total_spin = 0;
    int rank = 1;
};

struct EvolveOptions {
    IntegratorOptions integrator;
    int samples = 500;                          // uniform samples over the run
    std::vector<double> extra_sample_times;     // refinement near anticrossings
    std::optional<SpinRankLabel> track;         // fills fidelities when set
    int eig_k = 8;                              // states solved when tracking
};

// Solves i dpsi/dtau = H(eps(tau)) psi by adaptive 4th-order commutator-free
// Magnus steps with exact exponentials (each substep is exactly unitary).
StateTrajectory evolve_state(const Eigen::VectorXcd& psi0, const Geometry& geometry,
                             const ModelParams& params, const TiltSchedule& schedule,
                             const BasisSector& sector, const EvolveOptions& opts);

// |<psi|v_label(eps)>|^2 against the instantaneous eigenstate of the matching
// total-spin/rank label.
double instantaneous_fidelity(const Eigen::VectorXcd& psi, const Geometry& geometry,
                              const ModelParams& params, double epsilon,
                              const BasisSector& sector, const SpinRankLabel& label, int eig_k = 8);

// Mean charge profile over samples with time in [tau_a, tau_b].
Eigen::VectorXd time_averaged_charge(const StateTrajectory& trajectory, double tau_a, double tau_b);

// Adiabaticity lower bound T > 1/(min gap)^2 for the given spin sector.
double adiabatic_time_bound(const MinGapResult& gap);

// Trajectory CSV: tau, eps, fidelity, n_1..n_N.
void write_trajectory_csv(const StateTrajectory& traj, int sites, const std::string& path,
                          const std::string& metadata);

}  // namespace qcert
