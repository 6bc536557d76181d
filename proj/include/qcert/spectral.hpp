#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcert/fock.hpp"
#include "qcert/model.hpp"
#include "qcert/sparse.hpp"

namespace qcert {

// One low-energy eigenpair with its total-spin label and charge profile.
struct EigenstateRecord {
    double energy = 0.0;
    Eigen::VectorXd vector;         // unit norm; empty after table compaction
    int total_spin = -1;            // S from the S(S+1) eigenvalue
    int spin_rank = 0;              // 1-based energy rank within the same S
    double spin_residual = 0.0;     // |<S^2> - S(S+1)| before rounding
    Eigen::VectorXd charge_profile; // <n_k> per site

    std::string label() const;      // "S1", "T2", "Q1" (S=2), ...
};

struct EigensolveFailure : std::runtime_error {
    EigensolveFailure(const std::string& msg, double residual)
        : std::runtime_error(msg), achieved_residual(residual) {}
    double achieved_residual;
};

struct LanczosOptions {
    int k = 8;
    double tol = 1e-9;          // residual tolerance relative to ||H||
    int max_basis = 80;
    int max_restarts = 400;
    uint64_t seed = 0x5deece66dULL;
    const Eigen::MatrixXd* warm_start = nullptr;  // columns seed the start vector
};

struct LanczosResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    double worst_residual = 0.0;
    int matvec_count = 0;
};

// k lowest eigenpairs of a sparse symmetric operator by thick-restart Lanczos
// with full reorthogonalization. Throws EigensolveFailure on non-convergence.
LanczosResult lanczos_lowest(const SparseHermitian& A, const LanczosOptions& opts);

struct LowSpectrumOptions {
    int k = 8;
    double tol = 1e-9;
    int dense_threshold = 1000;  // full dense diagonalization at or below
    bool force_sparse = false;
    uint64_t seed = 0x5deece66dULL;
    const Eigen::MatrixXd* warm_start = nullptr;
};

// k lowest eigenstates of H labeled by total spin. Energy clusters closer
// than 1e-9*max(1,|E|) are rotated into the S^2 eigenbasis before labeling.
std::vector<EigenstateRecord> low_spectrum(const SparseHermitian& H, const SparseHermitian& S2,
                                           const BasisSector& sector,
                                           const LowSpectrumOptions& opts);

// Charge profile <n_k> of a normalized state vector.
Eigen::VectorXd charge_profile(const Eigen::VectorXd& v, const BasisSector& sector);
Eigen::VectorXd charge_profile(const Eigen::VectorXcd& v, const BasisSector& sector);

// Probability of each charge configuration in a state vector, aligned with
// the ChargeConfigTable order.
Eigen::VectorXd charge_distribution_of_vector(const Eigen::VectorXd& v,
                                              const ChargeConfigTable& configs);

struct SweepPoint {
    double epsilon = 0.0;
    std::vector<EigenstateRecord> records;           // sorted by energy
    std::vector<int> link_to_next;                   // record i -> record at next grid point
};

struct SweepOptions {
    int k = 8;
    double tol = 1e-9;
    int dense_threshold = 1000;
    bool keep_vectors = false;   // drop eigenvectors after linking (memory)
    int threads = 1;
    uint64_t seed = 0x5deece66dULL;
};

class SweepTable {
  public:
    std::vector<SweepPoint> points;

    const std::vector<double>& grid() const { return grid_; }
    void set_grid(std::vector<double> g) { grid_ = std::move(g); }

    // rank r (1-based) state of total spin S at grid point i, if present
    const EigenstateRecord* find(int point, int total_spin, int rank) const;

  private:
    std::vector<double> grid_;
};

// Eigenstates across an ascending tilt grid with continuity links by maximal
// overlap within equal-spin sectors.
SweepTable sweep_spectrum(const Geometry& geometry, const ModelParams& params,
                          const std::vector<double>& eps_grid, const BasisSector& sector,
                          const SweepOptions& opts);

struct AntiCrossing {
    double epsilon = 0.0;
    double gap = 0.0;
};

struct AntiCrossingOptions {
    int rank_low = 1;              // adjacent pair (rank_low, rank_low+1)
    double eps_resolution = 1e-3;  // golden-section refinement tolerance
    double profile_jump = 0.5;     // L1 charge-profile jump that flags a transition
};

// Avoided crossings of the (rank, rank+1) same-spin pair: local minima of the
// grid-sampled gap plus charge-rearrangement brackets, refined by
// golden-section search. Needs the solver context to re-solve inside brackets.
std::vector<AntiCrossing> detect_anticrossings(const SweepTable& table, int total_spin,
                                               const Geometry& geometry, const ModelParams& params,
                                               const BasisSector& sector, const SweepOptions& sweep_opts,
                                               const AntiCrossingOptions& ac_opts = {});

struct MinGapOptions {
    AntiCrossingOptions anticross;
    // Golden-refine detected anticrossings below grid resolution. With
    // refine=false the minimum is taken over the grid samples alone, which is
    // how sampled gap tables are usually quoted.
    bool refine = true;
    // Refined anticrossings with gaps below this floor are treated as
    // unresolved level crossings and excluded: a gap this small is swept
    // diabatically at realistic ramp rates and is narrower than the grid can
    // certify. Set to 0 to take the literal global minimum.
    double gap_floor = 0.05;
};

struct MinGapResult {
    double gap = 0.0;
    double epsilon = 0.0;
};

// Global minimum of the (rank1, rank2) same-spin gap over the sweep range:
// grid samples (boundaries included) plus refined resolvable anticrossings.
MinGapResult min_gap(const SweepTable& table, int total_spin, const Geometry& geometry,
                     const ModelParams& params, const BasisSector& sector,
                     const SweepOptions& sweep_opts, const MinGapOptions& opts = {});

// CSV: one row per (grid point, state): eps, label, energy, n_1..n_N.
void write_sweep_csv(const SweepTable& table, int sites, const std::string& path,
                     const std::string& metadata);

}  // namespace qcert
