#include "qcert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "qcert/util.hpp"

namespace qcert {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

struct EigDecomp {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// Exact exponential steps exp(-i H(eps) dt) via eigendecomposition of the
// dense real-symmetric H(eps) = H0 + eps * diag(tilt). Decompositions are
// cached per eps, which makes the hold phase (constant eps) nearly free.
class DensePropagator {
  public:
    explicit DensePropagator(const HamiltonianParts& parts)
        : h0_(parts.h0.dense()), tilt_(parts.tilt_diagonal) {}

    void apply(double eps, double dt, Eigen::VectorXcd& psi) {
        const EigDecomp& e = eig(eps);
        Eigen::VectorXcd phases =
            (std::complex<double>(0.0, -dt) * e.values.cast<std::complex<double>>().array())
                .exp()
                .matrix();
        psi = e.vectors * phases.cwiseProduct(e.vectors.transpose() * psi);
    }

  private:
    const EigDecomp& eig(double eps) {
        auto it = cache_.find(eps);
        if (it != cache_.end()) return it->second;
        if (cache_.size() > 8192) cache_.clear();
        Eigen::MatrixXd h = h0_;
        h.diagonal() += eps * tilt_;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        return cache_.emplace(eps, EigDecomp{es.eigenvalues(), es.eigenvectors()}).first->second;
    }

    Eigen::MatrixXd h0_;
    Eigen::VectorXd tilt_;
    std::map<double, EigDecomp> cache_;
};

// Krylov (Lanczos) exponential for sectors too large to diagonalize densely.
class SparsePropagator {
  public:
    explicit SparsePropagator(const HamiltonianParts& parts)
        : parts_(parts), hnorm0_(parts.h0.norm_inf()),
          tiltmax_(parts.tilt_diagonal.cwiseAbs().maxCoeff()) {}

    void apply(double eps, double dt, Eigen::VectorXcd& psi) {
        double hnorm = hnorm0_ + std::abs(eps) * tiltmax_;
        int pieces = std::max(1, int(std::ceil(std::abs(dt) * hnorm / 12.0)));
        double sub = dt / pieces;
        for (int p = 0; p < pieces; ++p) krylov_step(eps, sub, psi);
    }

  private:
    void krylov_step(double eps, double dt, Eigen::VectorXcd& psi) {
        const int dim = int(psi.size());
        const int m = std::min(36, dim);
        double beta0 = psi.norm();
        if (beta0 == 0.0) return;
        Eigen::MatrixXcd V(dim, m);
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        V.col(0) = psi / beta0;
        int used = m;
        Eigen::VectorXcd tiltc = parts_.tilt_diagonal.cast<std::complex<double>>();
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXcd w = parts_.h0.apply(Eigen::VectorXcd(V.col(j)));
            w += eps * V.col(j).cwiseProduct(tiltc);
            for (int i = 0; i <= j; ++i) {
                std::complex<double> c = V.col(i).dot(w);
                if (i >= j - 1) T(i, j) = c.real();
                w -= c * V.col(i);
            }
            double b = w.norm();
            if (j + 1 < m) {
                if (b < 1e-13) {
                    used = j + 1;
                    break;
                }
                T(j + 1, j) = T(j, j + 1) = b;
                V.col(j + 1) = w / b;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(used, used));
        Eigen::VectorXcd phases =
            (std::complex<double>(0.0, -dt) * es.eigenvalues().cast<std::complex<double>>().array())
                .exp()
                .matrix();
        Eigen::VectorXcd e0 = es.eigenvectors().row(0).transpose().cast<std::complex<double>>();
        Eigen::VectorXcd small = es.eigenvectors().cast<std::complex<double>>() * phases.cwiseProduct(e0);
        psi = beta0 * (V.leftCols(used) * small);
    }

    const HamiltonianParts& parts_;
    double hnorm0_;
    double tiltmax_;
};

// One CF4 step over [tau, tau+dt]: two exact exponentials at effective tilts
// from the Gauss nodes. Steps never straddle the ramp corner, so eps(tau) is
// linear across the step and each exponent is again a model Hamiltonian.
template <class Prop>
void cf4_step(Prop& prop, const TiltSchedule& sched, double tau, double dt,
              Eigen::VectorXcd& psi) {
    double e1 = sched.epsilon_at(tau + (0.5 - kSqrt3 / 6.0) * dt);
    double e2 = sched.epsilon_at(tau + (0.5 + kSqrt3 / 6.0) * dt);
    double a1 = 0.25 + kSqrt3 / 6.0;
    double a2 = 0.25 - kSqrt3 / 6.0;
    prop.apply(2.0 * (a1 * e1 + a2 * e2), 0.5 * dt, psi);
    prop.apply(2.0 * (a2 * e1 + a1 * e2), 0.5 * dt, psi);
}

template <class Prop>
void advance(Prop& prop, const TiltSchedule& sched, const IntegratorOptions& opts, double from,
             double to, Eigen::VectorXcd& psi, double& dt_hint) {
    double tau = from;
    double dt = std::min(dt_hint, to - from);
    Eigen::VectorXcd full, half;
    while (to - tau > 1e-12 * std::max(1.0, to)) {
        dt = std::min(dt, to - tau);
        if (tau < sched.t_max && tau + dt > sched.t_max) dt = sched.t_max - tau;

        full = psi;
        cf4_step(prop, sched, tau, dt, full);
        half = psi;
        cf4_step(prop, sched, tau, 0.5 * dt, half);
        cf4_step(prop, sched, tau + 0.5 * dt, 0.5 * dt, half);
        double err = (full - half).norm() / 15.0;

        if (err <= opts.tol || dt <= opts.min_step * 1.0001) {
            psi = half;
            tau += dt;
            double grow = err > 0 ? 0.9 * std::pow(opts.tol / err, 0.2) : 2.0;
            dt = std::min(dt * std::min(2.0, std::max(0.3, grow)), opts.max_step);
        } else {
            dt = 0.5 * dt;
            if (dt < opts.min_step) {
                throw PropagationFailure("evolve_state: step size underflow", tau);
            }
        }
    }
    dt_hint = dt;
}

}  // namespace

StateTrajectory evolve_state(const Eigen::VectorXcd& psi0, const Geometry& geometry,
                             const ModelParams& params, const TiltSchedule& schedule,
                             const BasisSector& sector, const EvolveOptions& opts) {
    if (psi0.size() != sector.dimension()) {
        throw std::invalid_argument("evolve_state: state dimension mismatch");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-8) {
        throw std::invalid_argument("evolve_state: initial state must be normalized");
    }

    auto parts = build_hamiltonian_parts(geometry, params, sector);

    std::vector<double> times;
    double total = schedule.total_time();
    int n = std::max(2, opts.samples);
    times.reserve(n + opts.extra_sample_times.size());
    for (int i = 0; i < n; ++i) times.push_back(total * double(i) / double(n - 1));
    for (double t : opts.extra_sample_times) {
        if (t >= 0.0 && t <= total) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [&](double a, double b) { return std::abs(a - b) < 1e-9 * total; }),
                times.end());

    StateTrajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    traj.epsilons.reserve(times.size());
    traj.charge_profiles.reserve(times.size());

    Eigen::VectorXcd psi = psi0;
    double dt_hint = std::min(opts.integrator.max_step, std::max(1e-3, total / 1e4));

    const bool dense = sector.dimension() <= opts.integrator.dense_threshold;
    DensePropagator dense_prop(parts);
    SparsePropagator sparse_prop(parts);

    double tau = 0.0;
    for (double target : times) {
        if (target > tau) {
            if (dense) {
                advance(dense_prop, schedule, opts.integrator, tau, target, psi, dt_hint);
            } else {
                advance(sparse_prop, schedule, opts.integrator, tau, target, psi, dt_hint);
            }
            tau = target;
        }
        traj.states.push_back(psi);
        traj.epsilons.push_back(schedule.epsilon_at(tau));
        traj.charge_profiles.push_back(charge_profile(psi, sector));
    }

    traj.fidelities.assign(times.size(), -1.0);
    if (opts.track) {
        SparseHermitian s2 = build_spin_squared(sector);
        Eigen::VectorXd prev;
        for (size_t i = 0; i < traj.times.size(); ++i) {
            LowSpectrumOptions lo;
            lo.k = opts.eig_k;
            auto recs = low_spectrum(parts.at(traj.epsilons[i]), s2, sector, lo);
            const EigenstateRecord* hit = nullptr;
            for (const auto& r : recs) {
                if (r.total_spin == opts.track->total_spin && r.spin_rank == opts.track->rank) {
                    hit = &r;
                }
            }
            if (!hit) continue;
            Eigen::VectorXd v = hit->vector;
            if (prev.size() > 0 && prev.dot(v) < 0) v = -v;
            prev = v;
            traj.fidelities[i] = std::norm(v.cast<std::complex<double>>().dot(traj.states[i]));
        }
    }
    return traj;
}

double instantaneous_fidelity(const Eigen::VectorXcd& psi, const Geometry& geometry,
                              const ModelParams& params, double epsilon,
                              const BasisSector& sector, const SpinRankLabel& label, int eig_k) {
    SparseHermitian h = build_hamiltonian(geometry, params, epsilon, sector);
    SparseHermitian s2 = build_spin_squared(sector);
    LowSpectrumOptions lo;
    lo.k = eig_k;
    auto recs = low_spectrum(h, s2, sector, lo);
    for (const auto& r : recs) {
        if (r.total_spin == label.total_spin && r.spin_rank == label.rank) {
            return std::norm(r.vector.cast<std::complex<double>>().dot(psi));
        }
    }
    throw std::invalid_argument("instantaneous_fidelity: label not found among the k lowest states");
}

Eigen::VectorXd time_averaged_charge(const StateTrajectory& traj, double tau_a, double tau_b) {
    Eigen::VectorXd acc;
    int count = 0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < tau_a || traj.times[i] > tau_b) continue;
        if (count == 0) {
            acc = traj.charge_profiles[i];
        } else {
            acc += traj.charge_profiles[i];
        }
        ++count;
    }
    if (count == 0) throw std::invalid_argument("time_averaged_charge: empty window");
    return acc / double(count);
}

double adiabatic_time_bound(const MinGapResult& gap) {
    if (gap.gap <= 0.0) throw std::invalid_argument("adiabatic_time_bound: gap must be positive");
    return 1.0 / (gap.gap * gap.gap);
}

void write_trajectory_csv(const StateTrajectory& traj, int sites, const std::string& path,
                          const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    out << metadata;
    out << "tau,eps,fidelity";
    for (int s = 1; s <= sites; ++s) out << ",n_" << s;
    out << "\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        out << format_sig(traj.times[i]) << "," << format_sig(traj.epsilons[i]) << ","
            << format_sig(traj.fidelities[i]);
        for (int s = 0; s < sites; ++s) out << "," << format_sig(traj.charge_profiles[i][s]);
        out << "\n";
    }
}

}  // namespace qcert
