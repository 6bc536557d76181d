#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qcert/dynamics.hpp"
#include "qcert/model.hpp"

namespace qcert {

// Dense density matrix over a basis sector (or a subspace of one).
struct DensityMatrix {
    Eigen::MatrixXcd rho;

    static DensityMatrix pure(const Eigen::VectorXcd& psi) {
        return {psi * psi.adjoint()};
    }
    double trace_error() const { return std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag()); }
    double hermiticity_error() const { return (rho - rho.adjoint()).norm(); }
    double purity() const { return (rho * rho).trace().real(); }
};

// Evolution frame for charge dephasing: an orthonormal basis over the sector
// in which every charge projector L_n is diagonal (0/1 by the per-column
// configuration label). The computational basis of the full sector is the
// trivial case; a fixed-total-spin block refines it for cheaper runs.
struct DephasingFrame {
    Eigen::MatrixXd basis;        // sector_dim x m; empty => identity (full sector)
    std::vector<int> labels;      // m entries: charge-config id per column
    Eigen::MatrixXd h0;           // m x m projected tilt-free Hamiltonian
    Eigen::VectorXd tilt;         // m entries: diagonal of the unit-tilt term
    ChargeConfigTable configs;    // shared config table of the sector

    int dim() const { return int(labels.size()); }
};

// Full-sector frame (identity basis).
DephasingFrame full_frame(const Geometry& geometry, const ModelParams& params,
                          const BasisSector& sector);

// Total-spin-S block frame: basis vectors of definite charge configuration and
// definite S^2, spanning the S-eigenspace of the sector.
DephasingFrame spin_block_frame(const Geometry& geometry, const ModelParams& params,
                                const BasisSector& sector, int total_spin);

// Embed a sector vector into frame coordinates (identity for full_frame).
Eigen::VectorXcd to_frame(const DephasingFrame& frame, const Eigen::VectorXcd& sector_vec);

struct LindbladOptions {
    double tol = 1e-7;      // local error per step (Frobenius)
    double max_step = 50.0;
    double min_step = 1e-10;
    int samples = 500;
    double positivity_tol = 1e-8;
};

struct LindbladSample {
    double tau = 0.0;
    double epsilon = 0.0;
    double trace = 1.0;
    double purity = 1.0;
    double entropy_bits = 0.0;
    Eigen::VectorXd charge_profile;
    Eigen::VectorXd distribution;  // aligned with frame.configs
};

struct LindbladResult {
    std::vector<LindbladSample> samples;
    DensityMatrix final_state;  // in frame coordinates
};

// Integrates d rho/d tau = -i[H(eps(tau)), rho]
//                          + gamma sum_n (L_n rho L_n - 1/2 {L_n, rho})
// with charge-configuration projectors L_n. Since L_n^2 = L_n and
// sum_n L_n = 1, the dissipator is gamma * (pinch(rho) - rho), where pinch
// zeroes coherences between different configurations. Strang splitting of the
// pinching decay with exact midpoint unitaries keeps every step completely
// positive and trace preserving, so trace, Hermiticity, positivity, and
// entropy monotonicity survive any step size; the tolerance only controls
// accuracy. Throws PropagationFailure if positivity degrades beyond tolerance.
LindbladResult evolve_lindblad(const DensityMatrix& rho0, const DephasingFrame& frame,
                               const TiltSchedule& schedule, double gamma,
                               const LindbladOptions& opts);

// p_n = Tr(rho L_n), clipped at 0 and renormalized; aligned with frame.configs.
Eigen::VectorXd charge_distribution(const DensityMatrix& rho, const DephasingFrame& frame);

// -sum lambda_i log2 lambda_i of the eigenvalues of rho.
double von_neumann_entropy(const DensityMatrix& rho);

// d(p||q) = sum_n p_n log2(p_n / q_n), with q clamped at `floor` wherever
// p_n > 0 and q_n < floor.
double kl_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double floor = 1e-12);

// Smallest integer M with 2^(-M d) <= target_error. Throws for d <= 0.
long sample_complexity(double d, double target_error);

void write_lindblad_csv(const std::vector<LindbladSample>& samples, int sites,
                        const std::string& path, const std::string& metadata);
void write_distribution_csv(const Eigen::VectorXd& p, const ChargeConfigTable& configs,
                            const std::string& path, const std::string& metadata);

}  // namespace qcert
