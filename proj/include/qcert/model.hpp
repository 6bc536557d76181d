#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "qcert/fock.hpp"
#include "qcert/sparse.hpp"

namespace qcert {

// Fermi-Hubbard couplings in units of the tunneling t (t sets the energy
// scale; times are in 1/t). The hopping enters with +t.
struct ModelParams {
    double t = 1.0;
    double U = 40.0;
    double V = 10.0;
};

// Chain of N sites or 2xC ladder. Ladder sites are labeled in ring order:
// row 1 left-to-right is 1..C, row 2 right-to-left is C+1..2C, so that the
// tilt pairing (k, N-k+1) puts equal potential on the two sites of a column.
class Geometry {
  public:
    enum class Kind { Chain, Ladder };

    static Geometry chain(int sites);
    static Geometry ladder(int cols);

    Kind kind() const { return kind_; }
    int sites() const { return sites_; }
    int cols() const { return cols_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    // Per-site weights w_k of the unit tilt: profile(eps) = eps * w.
    // Chain: w_k = k-1 (1-based). Ladder: sites k and N-k+1 share w = k-1.
    Eigen::VectorXd tilt_weights() const;

    std::string describe() const;

  private:
    Kind kind_ = Kind::Chain;
    int sites_ = 0;
    int cols_ = 0;
    std::vector<std::pair<int, int>> edges_;
};

using TiltProfile = Eigen::VectorXd;

// Per-site potentials at tilt strength eps.
TiltProfile tilt_profile(const Geometry& geometry, double epsilon);

// H = t sum_<kl>,sigma (c^dag_k c_l + h.c.) + sum_k eps_k n_k
//     + V sum_<kl> n_k n_l + (U/2) sum_k n_k (n_k - 1)
SparseHermitian build_hamiltonian(const Geometry& geometry, const ModelParams& params,
                                  double epsilon, const BasisSector& sector);

// Tilt-independent split H(eps) = H0 + eps * diag(weights): returns H(0) and
// the diagonal of the unit-tilt term. Lets sweeps reuse one assembly.
struct HamiltonianParts {
    SparseHermitian h0;
    Eigen::VectorXd tilt_diagonal;

    SparseHermitian at(double epsilon) const {
        return epsilon == 0.0 ? h0 : h0.with_added_diagonal(epsilon * tilt_diagonal);
    }
};
HamiltonianParts build_hamiltonian_parts(const Geometry& geometry, const ModelParams& params,
                                         const BasisSector& sector);

// S^2_tot = (sum_k S_k)^2 in the occupation basis; eigenvalues S(S+1).
SparseHermitian build_spin_squared(const BasisSector& sector);

// Charge configuration bookkeeping. Configurations (n_1..n_N) are the joint
// eigenspaces of all n_k; the projector onto a configuration is diagonal in
// the occupation basis. Configurations are listed in ascending lexicographic
// order of their occupancy tuples.
struct ChargeConfigTable {
    std::vector<std::vector<int>> configs;   // distinct occupancy tuples, lex order
    std::vector<int> config_of_state;        // basis index -> config index
    std::vector<std::vector<int>> members;   // config index -> basis indices

    int count() const { return int(configs.size()); }
};
ChargeConfigTable build_charge_configs(const BasisSector& sector);

// Explicit projectors L_n = sum |b><b| over basis states with configuration n,
// paired with the configuration tuple. Mutually orthogonal, sum to identity.
std::vector<std::pair<std::vector<int>, SparseHermitian>> build_charge_projectors(
    const BasisSector& sector);

}  // namespace qcert
