#include "qcert/model.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qcert {

Geometry Geometry::chain(int sites) {
    if (sites < 2) throw std::invalid_argument("chain: need at least 2 sites");
    if (sites % 2 != 0) throw std::invalid_argument("chain: site count must be even");
    Geometry g;
    g.kind_ = Kind::Chain;
    g.sites_ = sites;
    g.cols_ = sites;
    for (int k = 0; k + 1 < sites; ++k) g.edges_.emplace_back(k, k + 1);
    return g;
}

Geometry Geometry::ladder(int cols) {
    if (cols < 2) throw std::invalid_argument("ladder: need at least 2 columns");
    Geometry g;
    g.kind_ = Kind::Ladder;
    g.sites_ = 2 * cols;
    g.cols_ = cols;
    // 0-based ring order: row 1 is 0..C-1, row 2 is C..2C-1 reversed, so the
    // site below column j is 2C-1-j.
    for (int j = 0; j < cols; ++j) g.edges_.emplace_back(j, 2 * cols - 1 - j);  // vertical
    for (int j = 0; j + 1 < cols; ++j) {
        g.edges_.emplace_back(j, j + 1);                          // row 1
        g.edges_.emplace_back(2 * cols - 1 - j, 2 * cols - 2 - j);  // row 2
    }
    return g;
}

Eigen::VectorXd Geometry::tilt_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(sites_);
    if (kind_ == Kind::Chain) {
        for (int k = 0; k < sites_; ++k) w[k] = double(k);
    } else {
        for (int k = 0; k < sites_ / 2; ++k) {
            w[k] = double(k);
            w[sites_ - 1 - k] = double(k);
        }
    }
    return w;
}

std::string Geometry::describe() const {
    if (kind_ == Kind::Chain) return "chain N=" + std::to_string(sites_);
    return "ladder 2x" + std::to_string(cols_);
}

TiltProfile tilt_profile(const Geometry& geometry, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("tilt_profile: epsilon must be >= 0");
    return epsilon * geometry.tilt_weights();
}

namespace {

void check_compatible(const Geometry& geometry, const BasisSector& sector) {
    if (geometry.sites() != sector.sites()) {
        throw std::invalid_argument("geometry/sector site-count mismatch");
    }
}

}  // namespace

HamiltonianParts build_hamiltonian_parts(const Geometry& geometry, const ModelParams& params,
                                         const BasisSector& sector) {
    check_compatible(geometry, sector);
    if (params.t <= 0.0) throw std::invalid_argument("ModelParams: t must be > 0");
    if (params.U < 0.0 || params.V < 0.0) throw std::invalid_argument("ModelParams: U, V must be >= 0");

    const int dim = sector.dimension();
    const int n = sector.sites();
    std::vector<SparseHermitian::Triplet> trips;
    trips.reserve(size_t(dim) * (geometry.edges().size() + 1));
    Eigen::VectorXd tilt_diag = Eigen::VectorXd::Zero(dim);
    const Eigen::VectorXd w = geometry.tilt_weights();

    for (int ci = 0; ci < dim; ++ci) {
        const FockState& b = sector.state(ci);
        double diag = 0.0;
        double tdiag = 0.0;
        for (int k = 0; k < n; ++k) {
            int nk = occupancy(b, k);
            diag += 0.5 * params.U * nk * (nk - 1);
            tdiag += w[k] * nk;
        }
        for (const auto& [a, c] : geometry.edges()) {
            diag += params.V * occupancy(b, a) * occupancy(b, c);
        }
        trips.push_back({ci, ci, diag});
        tilt_diag[ci] = tdiag;

        for (const auto& [a, c] : geometry.edges()) {
            for (Spin spin : {Spin::Up, Spin::Down}) {
                for (auto [from, to] : {std::pair{a, c}, std::pair{c, a}}) {
                    if (auto h = apply_hop(b, from, to, spin)) {
                        int ri = sector.index_of(h->state);
                        if (ri <= ci) trips.push_back({ri, ci, params.t * h->sign});
                    }
                }
            }
        }
    }
    return {SparseHermitian::from_triplets(dim, std::move(trips)), std::move(tilt_diag)};
}

SparseHermitian build_hamiltonian(const Geometry& geometry, const ModelParams& params,
                                  double epsilon, const BasisSector& sector) {
    if (epsilon < 0.0) throw std::invalid_argument("build_hamiltonian: epsilon must be >= 0");
    auto parts = build_hamiltonian_parts(geometry, params, sector);
    return parts.at(epsilon);
}

SparseHermitian build_spin_squared(const BasisSector& sector) {
    const int dim = sector.dimension();
    const int n = sector.sites();
    std::vector<SparseHermitian::Triplet> trips;
    trips.reserve(size_t(dim) * (1 + size_t(n) * size_t(n) / 2));

    for (int ci = 0; ci < dim; ++ci) {
        const FockState& b = sector.state(ci);
        // z part plus on-site transverse part, both diagonal
        double sz = 0.0;
        double diag = 0.0;
        for (int k = 0; k < n; ++k) {
            int nu = (b.up >> k) & 1;
            int nd = (b.down >> k) & 1;
            sz += 0.5 * (nu - nd);
            diag += 0.5 * (nu * (1 - nd) + nd * (1 - nu));
        }
        diag += sz * sz;
        trips.push_back({ci, ci, diag});

        // S+_i S-_j = c^dag_{i,up} c_{i,dn} c^dag_{j,dn} c_{j,up}, all ordered
        // pairs i != j (this covers both transverse cross terms).
        for (int j = 0; j < n; ++j) {
            auto a1 = apply_annihilate(b, j, Spin::Up);
            if (!a1) continue;
            auto a2 = apply_create(a1->state, j, Spin::Down);
            if (!a2) continue;
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                auto a3 = apply_annihilate(a2->state, i, Spin::Down);
                if (!a3) continue;
                auto a4 = apply_create(a3->state, i, Spin::Up);
                if (!a4) continue;
                int ri = sector.index_of(a4->state);
                int sgn = a1->sign * a2->sign * a3->sign * a4->sign;
                if (ri <= ci) trips.push_back({ri, ci, double(sgn)});
            }
        }
    }
    return SparseHermitian::from_triplets(dim, std::move(trips));
}

ChargeConfigTable build_charge_configs(const BasisSector& sector) {
    const int dim = sector.dimension();
    const int n = sector.sites();
    std::map<std::vector<int>, std::vector<int>> buckets;
    for (int ci = 0; ci < dim; ++ci) {
        std::vector<int> cfg(n);
        for (int k = 0; k < n; ++k) cfg[k] = occupancy(sector.state(ci), k);
        buckets[cfg].push_back(ci);
    }
    ChargeConfigTable table;
    table.config_of_state.assign(dim, -1);
    table.configs.reserve(buckets.size());
    table.members.reserve(buckets.size());
    for (auto& [cfg, members] : buckets) {
        int id = table.count();
        for (int ci : members) table.config_of_state[ci] = id;
        table.configs.push_back(cfg);
        table.members.push_back(std::move(members));
    }
    return table;
}

std::vector<std::pair<std::vector<int>, SparseHermitian>> build_charge_projectors(
    const BasisSector& sector) {
    auto table = build_charge_configs(sector);
    std::vector<std::pair<std::vector<int>, SparseHermitian>> out;
    out.reserve(table.count());
    for (int id = 0; id < table.count(); ++id) {
        std::vector<SparseHermitian::Triplet> trips;
        trips.reserve(table.members[id].size());
        for (int ci : table.members[id]) trips.push_back({ci, ci, 1.0});
        out.emplace_back(table.configs[id],
                         SparseHermitian::from_triplets(sector.dimension(), std::move(trips)));
    }
    return out;
}

}  // namespace qcert
