#include "qcert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "qcert/util.hpp"

namespace qcert {

std::string EigenstateRecord::label() const {
    static const char* names = "STQFGH";  // S=0..5
    std::string head = (total_spin >= 0 && total_spin < 6)
                           ? std::string(1, names[total_spin])
                           : ("S" + std::to_string(total_spin) + "_");
    return head + std::to_string(spin_rank);
}

// ---------------------------------------------------------------------------
// Thick-restart Lanczos with full reorthogonalization
// ---------------------------------------------------------------------------

LanczosResult lanczos_lowest(const SparseHermitian& A, const LanczosOptions& opts) {
    const int dim = A.dimension();
    const int k = std::min(opts.k, dim);
    if (k <= 0) throw std::invalid_argument("lanczos_lowest: k must be positive");
    const int m_max = std::min(dim, std::max(opts.max_basis, 3 * k + 10));
    const double scale = std::max(1.0, A.norm_inf());

    Eigen::MatrixXd V(dim, m_max + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_max + 1, m_max + 1);
    LanczosResult result;

    std::mt19937_64 rng(opts.seed + uint64_t(dim));
    std::normal_distribution<double> gauss;

    auto random_vector = [&]() {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
        return v;
    };

    // start vector: sum of warm-start columns when provided
    Eigen::VectorXd v0;
    if (opts.warm_start && opts.warm_start->rows() == dim && opts.warm_start->cols() > 0) {
        v0 = opts.warm_start->rowwise().sum();
        if (v0.norm() < 1e-12) v0 = random_vector();
    } else {
        v0 = random_vector();
    }
    V.col(0) = v0 / v0.norm();

    int m = 1;  // current basis size
    Eigen::VectorXd w(dim);

    auto expand = [&](int j) -> double {
        // w = A v_j, orthogonalized against V[:, 0..j]; returns ||w||.
        // Projection coefficients land in column j of T (mirrored).
        w = A.apply(Eigen::VectorXd(V.col(j)));
        for (int i = 0; i <= j; ++i) {
            double c = V.col(i).dot(w);
            T(i, j) = c;
            T(j, i) = c;
            w -= c * V.col(i);
        }
        for (int i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);  // DGKS cleanup
        return w.norm();
    };

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        // grow the basis to m_max
        while (m <= m_max) {
            int j = m - 1;
            double beta = expand(j);
            if (beta < 1e-10 * scale) {
                // invariant subspace: continue with a fresh random direction
                Eigen::VectorXd r = random_vector();
                for (int i = 0; i < m; ++i) r -= V.col(i).dot(r) * V.col(i);
                double rn = r.norm();
                if (rn < 1e-10) break;  // sector exhausted
                V.col(m) = r / rn;
                T(m, j) = T(j, m) = 0.0;
            } else {
                V.col(m) = w / beta;
                T(m, j) = T(j, m) = beta;
            }
            if (m == m_max) break;
            ++m;
        }

        // Rayleigh-Ritz on the m x m projected matrix
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& s = es.eigenvectors();

        // residual bounds |beta_m * s(m-1, i)| for the k lowest
        double beta_live = T(m, m - 1);
        double worst = 0.0;
        for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(beta_live * s(m - 1, i)));
        result.worst_residual = worst;

        if (worst <= opts.tol * scale || m >= dim) {
            Eigen::MatrixXd X = V.leftCols(m) * s.leftCols(k);
            // verify true residuals
            double verified = 0.0;
            for (int i = 0; i < k; ++i) {
                Eigen::VectorXd x = X.col(i);
                x.normalize();
                X.col(i) = x;
                verified = std::max(verified, (A.apply(x) - theta[i] * x).norm());
            }
            result.values = theta.head(k);
            result.vectors = X;
            result.worst_residual = verified;
            if (verified > 10 * opts.tol * scale && m < dim) {
                throw EigensolveFailure("lanczos_lowest: verification residual " +
                                            std::to_string(verified) + " exceeds tolerance",
                                        verified);
            }
            return result;
        }

        if (restart == opts.max_restarts) break;

        // thick restart: keep the lowest l Ritz vectors plus the live residual
        int l = std::min(k + std::max(k, 6), m - 2);
        Eigen::MatrixXd W = V.leftCols(m) * s.leftCols(l);
        Eigen::VectorXd vres = V.col(m);  // normalized residual direction
        V.leftCols(l) = W;
        V.col(l) = vres;
        T.setZero();
        for (int i = 0; i < l; ++i) T(i, i) = theta[i];
        // couplings beta * s(m-1, i) re-enter through expansion of column l
        m = l + 1;
    }

    throw EigensolveFailure("lanczos_lowest: no convergence after " +
                                std::to_string(opts.max_restarts) + " restarts; residual " +
                                std::to_string(result.worst_residual),
                            result.worst_residual);
}

// ---------------------------------------------------------------------------
// Labeled low spectrum
// ---------------------------------------------------------------------------

Eigen::VectorXd charge_profile(const Eigen::VectorXd& v, const BasisSector& sector) {
    Eigen::VectorXd prof = Eigen::VectorXd::Zero(sector.sites());
    for (int b = 0; b < sector.dimension(); ++b) {
        double w = v[b] * v[b];
        if (w == 0.0) continue;
        for (int s = 0; s < sector.sites(); ++s) prof[s] += w * occupancy(sector.state(b), s);
    }
    return prof;
}

Eigen::VectorXd charge_profile(const Eigen::VectorXcd& v, const BasisSector& sector) {
    Eigen::VectorXd prof = Eigen::VectorXd::Zero(sector.sites());
    for (int b = 0; b < sector.dimension(); ++b) {
        double w = std::norm(v[b]);
        if (w == 0.0) continue;
        for (int s = 0; s < sector.sites(); ++s) prof[s] += w * occupancy(sector.state(b), s);
    }
    return prof;
}

Eigen::VectorXd charge_distribution_of_vector(const Eigen::VectorXd& v,
                                              const ChargeConfigTable& configs) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(configs.count());
    for (int b = 0; b < int(configs.config_of_state.size()); ++b) {
        p[configs.config_of_state[b]] += v[b] * v[b];
    }
    double total = p.sum();
    if (total > 0) p /= total;
    return p;
}

namespace {

void canonical_sign(Eigen::VectorXd& v) {
    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > amax) {
            amax = std::abs(v[i]);
            imax = i;
        }
    }
    if (v[imax] < 0) v = -v;
}

}  // namespace

std::vector<EigenstateRecord> low_spectrum(const SparseHermitian& H, const SparseHermitian& S2,
                                           const BasisSector& sector,
                                           const LowSpectrumOptions& opts) {
    const int dim = H.dimension();
    const int k = std::min(opts.k, dim);

    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
    if (dim <= opts.dense_threshold && !opts.force_sparse) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.dense());
        energies = es.eigenvalues().head(k);
        vectors = es.eigenvectors().leftCols(k);
    } else {
        LanczosOptions lopts;
        lopts.k = k;
        lopts.tol = opts.tol;
        lopts.seed = opts.seed;
        lopts.warm_start = opts.warm_start;
        LanczosResult res = lanczos_lowest(H, lopts);
        energies = res.values;
        vectors = res.vectors;
    }

    // rotate degenerate clusters into the S^2 eigenbasis
    std::vector<EigenstateRecord> records(k);
    int i = 0;
    while (i < k) {
        int j = i;
        while (j + 1 < k &&
               std::abs(energies[j + 1] - energies[i]) < 1e-9 * std::max(1.0, std::abs(energies[i]))) {
            ++j;
        }
        int nb = j - i + 1;
        Eigen::MatrixXd block = vectors.middleCols(i, nb);
        if (nb > 1) {
            Eigen::MatrixXd s2block(nb, nb);
            Eigen::MatrixXd s2cols(block.rows(), nb);
            for (int c = 0; c < nb; ++c) s2cols.col(c) = S2.apply(Eigen::VectorXd(block.col(c)));
            s2block = block.transpose() * s2cols;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s2block);
            block = block * es.eigenvectors();
        }
        for (int c = 0; c < nb; ++c) {
            Eigen::VectorXd v = block.col(c);
            v.normalize();
            canonical_sign(v);
            double q = v.dot(S2.apply(v));
            double s_real = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::max(0.0, q)));
            int s_int = int(std::lround(s_real));
            records[i + c].energy = energies[i + c];
            records[i + c].total_spin = s_int;
            records[i + c].spin_residual = std::abs(q - double(s_int) * (s_int + 1));
            records[i + c].charge_profile = charge_profile(v, sector);
            records[i + c].vector = std::move(v);
        }
        // within a cluster, order by (spin, energy) for deterministic output
        std::sort(records.begin() + i, records.begin() + j + 1,
                  [](const EigenstateRecord& a, const EigenstateRecord& b) {
                      if (a.total_spin != b.total_spin) return a.total_spin < b.total_spin;
                      return a.energy < b.energy;
                  });
        i = j + 1;
    }

    // spin ranks in energy order
    std::map<int, int> rank_counter;
    for (auto& rec : records) rec.spin_rank = ++rank_counter[rec.total_spin];
    return records;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

const EigenstateRecord* SweepTable::find(int point, int total_spin, int rank) const {
    for (const auto& r : points[point].records) {
        if (r.total_spin == total_spin && r.spin_rank == rank) return &r;
    }
    return nullptr;
}

SweepTable sweep_spectrum(const Geometry& geometry, const ModelParams& params,
                          const std::vector<double>& eps_grid, const BasisSector& sector,
                          const SweepOptions& opts) {
    if (eps_grid.empty()) throw std::invalid_argument("sweep_spectrum: empty grid");
    for (size_t i = 0; i + 1 < eps_grid.size(); ++i) {
        if (eps_grid[i + 1] <= eps_grid[i]) {
            throw std::invalid_argument("sweep_spectrum: grid must be strictly ascending");
        }
    }

    auto parts = build_hamiltonian_parts(geometry, params, sector);
    SparseHermitian s2 = build_spin_squared(sector);

    SweepTable table;
    table.set_grid(eps_grid);
    table.points.resize(eps_grid.size());

    const int npts = int(eps_grid.size());
    const int chunk = std::max(1, opts.threads);
    Eigen::MatrixXd warm;  // eigenvectors of the最 recently solved point

    for (int base = 0; base < npts; base += chunk) {
        int hi = std::min(npts, base + chunk);
        const Eigen::MatrixXd* warm_ptr = warm.size() > 0 ? &warm : nullptr;
        parallel_for(base, hi, opts.threads, [&](int i) {
            LowSpectrumOptions lo;
            lo.k = opts.k;
            lo.tol = opts.tol;
            lo.dense_threshold = opts.dense_threshold;
            lo.seed = opts.seed;
            lo.warm_start = warm_ptr;
            SparseHermitian h = parts.at(eps_grid[i]);
            try {
                table.points[i].records = low_spectrum(h, s2, sector, lo);
            } catch (const EigensolveFailure& e) {
                throw EigensolveFailure("sweep_spectrum at eps=" + format_sig(eps_grid[i], 6) +
                                            ": " + e.what(),
                                        e.achieved_residual);
            }
            table.points[i].epsilon = eps_grid[i];
        });
        // refresh warm start from the last point of this chunk
        const auto& recs = table.points[hi - 1].records;
        if (!recs.empty() && recs[0].vector.size() > 0) {
            warm.resize(recs[0].vector.size(), int(recs.size()));
            for (int c = 0; c < int(recs.size()); ++c) warm.col(c) = recs[c].vector;
        }
        // continuity links for finished points, then optionally drop vectors
        for (int i = std::max(0, base - 1); i < hi - 1; ++i) {
            auto& here = table.points[i];
            auto& next = table.points[i + 1];
            here.link_to_next.assign(here.records.size(), -1);
            std::vector<bool> taken(next.records.size(), false);
            for (size_t a = 0; a < here.records.size(); ++a) {
                double best = 0.0;
                int pick = -1;
                for (size_t b = 0; b < next.records.size(); ++b) {
                    if (taken[b]) continue;
                    if (next.records[b].total_spin != here.records[a].total_spin) continue;
                    double ov = std::abs(here.records[a].vector.dot(next.records[b].vector));
                    if (ov > best) {
                        best = ov;
                        pick = int(b);
                    }
                }
                if (pick >= 0) {
                    here.link_to_next[a] = pick;
                    taken[pick] = true;
                }
            }
            if (!opts.keep_vectors && i > 0) {
                for (auto& r : table.points[i - 1].records) r.vector.resize(0);
            }
        }
    }
    if (!opts.keep_vectors) {
        for (int i = 0; i + 1 < npts; ++i) {
            for (auto& r : table.points[i].records) r.vector.resize(0);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Anti-crossings and minimum gaps
// ---------------------------------------------------------------------------

namespace {

struct GapEvaluator {
    const Geometry& geometry;
    const ModelParams& params;
    const BasisSector& sector;
    const SweepOptions& opts;
    HamiltonianParts parts;
    SparseHermitian s2;
    int total_spin;
    int rank_low;

    GapEvaluator(const Geometry& g, const ModelParams& p, const BasisSector& sec,
                 const SweepOptions& o, int spin, int rank)
        : geometry(g), params(p), sector(sec), opts(o),
          parts(build_hamiltonian_parts(g, p, sec)), s2(build_spin_squared(sec)),
          total_spin(spin), rank_low(rank) {}

    double operator()(double eps) const {
        LowSpectrumOptions lo;
        lo.k = opts.k;
        lo.tol = opts.tol;
        lo.dense_threshold = opts.dense_threshold;
        lo.seed = opts.seed;
        auto recs = low_spectrum(parts.at(eps), s2, sector, lo);
        const EigenstateRecord* a = nullptr;
        const EigenstateRecord* b = nullptr;
        for (const auto& r : recs) {
            if (r.total_spin != total_spin) continue;
            if (r.spin_rank == rank_low) a = &r;
            if (r.spin_rank == rank_low + 1) b = &r;
        }
        if (!a || !b) return std::numeric_limits<double>::quiet_NaN();
        return b->energy - a->energy;
    }
};

// golden-section minimization; f assumed unimodal-ish on [lo, hi]
std::pair<double, double> golden_min(const std::function<double(double)>& f, double lo, double hi,
                                     double xtol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (!(f1 <= f2)) {  // NaN-tolerant: move toward finite values
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    double fm = f(xm);
    if (f1 < fm) { xm = x1; fm = f1; }
    if (f2 < fm) { xm = x2; fm = f2; }
    return {xm, fm};
}

std::vector<double> gap_samples(const SweepTable& table, int total_spin, int rank_low) {
    std::vector<double> g(table.points.size(), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < table.points.size(); ++i) {
        const EigenstateRecord* a = table.find(int(i), total_spin, rank_low);
        const EigenstateRecord* b = table.find(int(i), total_spin, rank_low + 1);
        if (a && b) g[i] = b->energy - a->energy;
    }
    return g;
}

}  // namespace

std::vector<AntiCrossing> detect_anticrossings(const SweepTable& table, int total_spin,
                                               const Geometry& geometry, const ModelParams& params,
                                               const BasisSector& sector, const SweepOptions& sweep_opts,
                                               const AntiCrossingOptions& ac) {
    const auto& grid = table.grid();
    if (grid.size() < 3) return {};
    std::vector<double> g = gap_samples(table, total_spin, ac.rank_low);

    // candidate refinement brackets
    std::vector<std::pair<double, double>> brackets;
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
        if (std::isnan(g[i]) || std::isnan(g[i - 1]) || std::isnan(g[i + 1])) continue;
        if (g[i] < g[i - 1] && g[i] <= g[i + 1]) brackets.emplace_back(grid[i - 1], grid[i + 1]);
    }
    // charge rearrangements flag anticrossings narrower than the grid
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        bool jump = false;
        for (int rank : {ac.rank_low, ac.rank_low + 1}) {
            const EigenstateRecord* a = table.find(int(i), total_spin, rank);
            const EigenstateRecord* b = table.find(int(i + 1), total_spin, rank);
            if (a && b && (a->charge_profile - b->charge_profile).lpNorm<1>() > ac.profile_jump) {
                jump = true;
            }
        }
        if (jump) brackets.emplace_back(grid[i], grid[i + 1]);
    }
    if (brackets.empty()) return {};

    std::sort(brackets.begin(), brackets.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& br : brackets) {
        if (!merged.empty() && br.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, br.second);
        } else {
            merged.push_back(br);
        }
    }

    GapEvaluator eval(geometry, params, sector, sweep_opts, total_spin, ac.rank_low);
    std::vector<AntiCrossing> out;
    for (auto& [lo, hi] : merged) {
        // anticrossings of higher pairs can make the bracket multi-modal:
        // locate the global valley on a fine pre-scan, then refine inside it
        const int nscan = 24;
        int best_i = -1;
        double best_v = std::numeric_limits<double>::infinity();
        std::vector<double> xs(nscan), vs(nscan);
        for (int i = 0; i < nscan; ++i) {
            xs[i] = lo + (hi - lo) * double(i) / double(nscan - 1);
            vs[i] = eval(xs[i]);
            if (!std::isnan(vs[i]) && vs[i] < best_v) {
                best_v = vs[i];
                best_i = i;
            }
        }
        if (best_i < 0) continue;
        double glo = xs[std::max(0, best_i - 1)];
        double ghi = xs[std::min(nscan - 1, best_i + 1)];
        auto [eps_star, gap] = golden_min([&](double e) { return eval(e); }, glo, ghi,
                                          ac.eps_resolution);
        if (std::isnan(gap) || gap > best_v) {
            eps_star = xs[best_i];
            gap = best_v;
        }
        // interior minima only: boundary-hugging results are grid artifacts
        double span = hi - lo;
        if (eps_star - lo < 0.02 * span || hi - eps_star < 0.02 * span) {
            bool at_table_edge = (lo <= grid.front() + 1e-12) || (hi >= grid.back() - 1e-12);
            if (at_table_edge) continue;
        }
        out.push_back({eps_star, gap});
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.epsilon < b.epsilon; });
    return out;
}

MinGapResult min_gap(const SweepTable& table, int total_spin, const Geometry& geometry,
                     const ModelParams& params, const BasisSector& sector,
                     const SweepOptions& sweep_opts, const MinGapOptions& opts) {
    const auto& grid = table.grid();
    std::vector<double> g = gap_samples(table, total_spin, opts.anticross.rank_low);
    MinGapResult best{std::numeric_limits<double>::infinity(), 0.0};
    int valid = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (std::isnan(g[i])) continue;
        ++valid;
        if (g[i] < best.gap) best = {g[i], grid[i]};
    }
    if (valid < 2) {
        throw std::invalid_argument("min_gap: need at least two grid points with the requested pair");
    }
    if (opts.refine) {
        auto crossings = detect_anticrossings(table, total_spin, geometry, params, sector,
                                              sweep_opts, opts.anticross);
        for (const auto& c : crossings) {
            if (c.gap < opts.gap_floor) continue;  // unresolved level crossing
            if (c.gap < best.gap) best = {c.gap, c.epsilon};
        }
    }
    return best;
}

void write_sweep_csv(const SweepTable& table, int sites, const std::string& path,
                     const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
    out << metadata;
    out << "eps,state,energy";
    for (int s = 1; s <= sites; ++s) out << ",n_" << s;
    out << "\n";
    for (const auto& pt : table.points) {
        for (const auto& r : pt.records) {
            out << format_sig(pt.epsilon) << "," << r.label() << "," << format_sig(r.energy);
            for (int s = 0; s < sites; ++s) out << "," << format_sig(r.charge_profile[s]);
            out << "\n";
        }
    }
}

}  // namespace qcert
