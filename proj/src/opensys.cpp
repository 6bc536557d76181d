#include "qcert/opensys.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "qcert/util.hpp"

namespace qcert {

DephasingFrame full_frame(const Geometry& geometry, const ModelParams& params,
                          const BasisSector& sector) {
    auto parts = build_hamiltonian_parts(geometry, params, sector);
    DephasingFrame frame;
    frame.configs = build_charge_configs(sector);
    frame.labels = frame.configs.config_of_state;
    frame.h0 = parts.h0.dense();
    frame.tilt = parts.tilt_diagonal;
    return frame;
}

DephasingFrame spin_block_frame(const Geometry& geometry, const ModelParams& params,
                                const BasisSector& sector, int total_spin) {
    auto parts = build_hamiltonian_parts(geometry, params, sector);
    SparseHermitian s2 = build_spin_squared(sector);
    auto configs = build_charge_configs(sector);
    const double target = double(total_spin) * (total_spin + 1);

    // Diagonalize S^2 within each charge-configuration subspace; keep the
    // eigenvectors at S(S+1). They have definite configuration by construction.
    std::vector<Eigen::VectorXd> columns;
    std::vector<int> labels;
    Eigen::MatrixXd s2dense = s2.dense();
    for (int id = 0; id < configs.count(); ++id) {
        const auto& members = configs.members[id];
        const int nb = int(members.size());
        Eigen::MatrixXd block(nb, nb);
        for (int a = 0; a < nb; ++a) {
            for (int b = 0; b < nb; ++b) block(a, b) = s2dense(members[a], members[b]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        for (int c = 0; c < nb; ++c) {
            if (std::abs(es.eigenvalues()[c] - target) < 1e-6) {
                Eigen::VectorXd col = Eigen::VectorXd::Zero(sector.dimension());
                for (int a = 0; a < nb; ++a) col[members[a]] = es.eigenvectors()(a, c);
                columns.push_back(std::move(col));
                labels.push_back(id);
            }
        }
    }
    if (columns.empty()) {
        throw std::invalid_argument("spin_block_frame: sector has no states of the requested spin");
    }

    DephasingFrame frame;
    frame.configs = std::move(configs);
    frame.labels = std::move(labels);
    frame.basis.resize(sector.dimension(), int(columns.size()));
    for (int c = 0; c < int(columns.size()); ++c) frame.basis.col(c) = columns[c];
    Eigen::MatrixXd h0_full = parts.h0.dense();
    frame.h0 = frame.basis.transpose() * h0_full * frame.basis;
    frame.tilt.resize(frame.dim());
    for (int c = 0; c < frame.dim(); ++c) {
        const auto& cfg = frame.configs.configs[frame.labels[c]];
        double w = 0.0;
        Eigen::VectorXd weights = geometry.tilt_weights();
        for (int s = 0; s < int(cfg.size()); ++s) w += weights[s] * cfg[s];
        frame.tilt[c] = w;
    }
    return frame;
}

Eigen::VectorXcd to_frame(const DephasingFrame& frame, const Eigen::VectorXcd& sector_vec) {
    if (frame.basis.size() == 0) return sector_vec;
    Eigen::VectorXcd v = frame.basis.transpose().cast<std::complex<double>>() * sector_vec;
    double n = v.norm();
    if (n < 1.0 - 1e-6) {
        throw std::invalid_argument("to_frame: state leaks outside the frame subspace");
    }
    return v / n;
}

// ---------------------------------------------------------------------------

namespace {

struct EigDecomp {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

class FramePropagator {
  public:
    explicit FramePropagator(const DephasingFrame& frame) : frame_(frame) {}

    // rho -> U rho U^dag with U = exp(-i H(eps) dt)
    void unitary(double eps, double dt, Eigen::MatrixXcd& rho) {
        const EigDecomp& e = eig(eps);
        Eigen::VectorXcd phases =
            (std::complex<double>(0.0, -dt) * e.values.cast<std::complex<double>>().array())
                .exp()
                .matrix();
        Eigen::MatrixXcd u = e.vectors.cast<std::complex<double>>() * phases.asDiagonal() *
                             e.vectors.transpose().cast<std::complex<double>>();
        rho = u * rho * u.adjoint();
    }

    // rho -> pinch-decay: coherences between different configurations are
    // damped by exp(-gamma dt); a convex mix of identity and pinching, hence
    // completely positive, trace preserving, and unital for any dt >= 0.
    void decay(double gamma, double dt, Eigen::MatrixXcd& rho) const {
        if (gamma == 0.0 || dt == 0.0) return;
        double f = std::exp(-gamma * dt);
        const auto& lab = frame_.labels;
        for (int a = 0; a < rho.rows(); ++a) {
            for (int b = 0; b < rho.cols(); ++b) {
                if (lab[a] != lab[b]) rho(a, b) *= f;
            }
        }
    }

  private:
    const EigDecomp& eig(double eps) {
        auto it = cache_.find(eps);
        if (it != cache_.end()) return it->second;
        if (cache_.size() > 8192) cache_.clear();
        Eigen::MatrixXd h = frame_.h0;
        h.diagonal() += eps * frame_.tilt;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        return cache_.emplace(eps, EigDecomp{es.eigenvalues(), es.eigenvectors()}).first->second;
    }

    const DephasingFrame& frame_;
    std::map<double, EigDecomp> cache_;
};

// Strang step: half decay, exact midpoint unitary, half decay.
void strang_step(FramePropagator& prop, const TiltSchedule& sched, double gamma, double tau,
                 double dt, Eigen::MatrixXcd& rho) {
    prop.decay(gamma, 0.5 * dt, rho);
    prop.unitary(sched.epsilon_at(tau + 0.5 * dt), dt, rho);
    prop.decay(gamma, 0.5 * dt, rho);
}

}  // namespace

Eigen::VectorXd charge_distribution(const DensityMatrix& rho, const DephasingFrame& frame) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(frame.configs.count());
    for (int a = 0; a < rho.rho.rows(); ++a) {
        p[frame.labels[a]] += rho.rho(a, a).real();
    }
    p = p.cwiseMax(0.0);
    double total = p.sum();
    if (total > 0) p /= total;
    return p;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double lam = es.eigenvalues()[i];
        if (lam > 1e-300) s -= lam * std::log2(lam);
    }
    return s;
}

LindbladResult evolve_lindblad(const DensityMatrix& rho0, const DephasingFrame& frame,
                               const TiltSchedule& schedule, double gamma,
                               const LindbladOptions& opts) {
    const int m = frame.dim();
    if (rho0.rho.rows() != m || rho0.rho.cols() != m) {
        throw std::invalid_argument("evolve_lindblad: density matrix does not match the frame");
    }
    if (gamma < 0.0) throw std::invalid_argument("evolve_lindblad: gamma must be >= 0");
    if (rho0.trace_error() > 1e-8) throw std::invalid_argument("evolve_lindblad: trace(rho0) != 1");
    if (rho0.hermiticity_error() > 1e-10) {
        throw std::invalid_argument("evolve_lindblad: rho0 not Hermitian");
    }

    FramePropagator prop(frame);
    double total = schedule.total_time();
    int n = std::max(2, opts.samples);
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) times[i] = total * double(i) / double(n - 1);

    LindbladResult result;
    result.samples.reserve(times.size());

    Eigen::MatrixXcd rho = rho0.rho;
    Eigen::MatrixXcd full, half;
    double tau = 0.0;
    double dt = std::min(opts.max_step, std::max(1e-3, total / 2e4));

    auto record = [&](double t) {
        DensityMatrix dm{rho};
        LindbladSample s;
        s.tau = t;
        s.epsilon = schedule.epsilon_at(t);
        s.trace = rho.trace().real();
        s.purity = dm.purity();
        s.entropy_bits = von_neumann_entropy(dm);
        s.distribution = charge_distribution(dm, frame);
        s.charge_profile = Eigen::VectorXd::Zero(frame.configs.configs[0].size());
        for (int c = 0; c < frame.configs.count(); ++c) {
            const auto& cfg = frame.configs.configs[c];
            for (int k = 0; k < int(cfg.size()); ++k) s.charge_profile[k] += s.distribution[c] * cfg[k];
        }
        // positivity within tolerance: clip and renormalize, or fail hard
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
        double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -opts.positivity_tol) {
            throw PropagationFailure("evolve_lindblad: positivity violation " +
                                         std::to_string(min_eig) + " at tau=" + std::to_string(t),
                                     t);
        }
        result.samples.push_back(std::move(s));
    };

    for (double target : times) {
        while (target - tau > 1e-12 * std::max(1.0, total)) {
            dt = std::min(dt, target - tau);
            if (tau < schedule.t_max && tau + dt > schedule.t_max) dt = schedule.t_max - tau;

            full = rho;
            strang_step(prop, schedule, gamma, tau, dt, full);
            half = rho;
            strang_step(prop, schedule, gamma, tau, 0.5 * dt, half);
            strang_step(prop, schedule, gamma, tau + 0.5 * dt, 0.5 * dt, half);
            double err = (full - half).norm() / 3.0;

            if (err <= opts.tol || dt <= opts.min_step * 1.0001) {
                rho = half;
                tau += dt;
                double grow = err > 0 ? 0.9 * std::pow(opts.tol / err, 1.0 / 3.0) : 2.0;
                dt = std::min(dt * std::min(2.0, std::max(0.3, grow)), opts.max_step);
            } else {
                dt = 0.5 * dt;
                if (dt < opts.min_step) {
                    throw PropagationFailure("evolve_lindblad: step size underflow", tau);
                }
            }
        }
        record(target);
    }

    result.final_state = DensityMatrix{rho};
    return result;
}

double kl_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double floor) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("kl_distance: distributions over different supports");
    }
    double d = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        double qi = std::max(q[i], floor);
        d += p[i] * std::log2(p[i] / qi);
    }
    return d;
}

long sample_complexity(double d, double target_error) {
    if (d <= 0.0) throw std::invalid_argument("sample_complexity: distance must be positive");
    if (target_error <= 0.0 || target_error >= 1.0) {
        throw std::invalid_argument("sample_complexity: target error must be in (0, 1)");
    }
    double bits = -std::log2(target_error);
    long m = long(std::ceil(bits / d - 1e-12));
    return std::max(1L, m);
}

void write_lindblad_csv(const std::vector<LindbladSample>& samples, int sites,
                        const std::string& path, const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_lindblad_csv: cannot open " + path);
    out << metadata;
    out << "tau,eps,trace,purity,entropy_bits";
    for (int s = 1; s <= sites; ++s) out << ",n_" << s;
    out << "\n";
    for (const auto& s : samples) {
        out << format_sig(s.tau) << "," << format_sig(s.epsilon) << "," << format_sig(s.trace)
            << "," << format_sig(s.purity) << "," << format_sig(s.entropy_bits);
        for (int k = 0; k < sites; ++k) out << "," << format_sig(s.charge_profile[k]);
        out << "\n";
    }
}

void write_distribution_csv(const Eigen::VectorXd& p, const ChargeConfigTable& configs,
                            const std::string& path, const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_distribution_csv: cannot open " + path);
    out << metadata;
    out << "config,p\n";
    for (int c = 0; c < configs.count(); ++c) {
        out << "\"(";
        for (size_t k = 0; k < configs.configs[c].size(); ++k) {
            if (k) out << ",";
            out << configs.configs[c][k];
        }
        out << ")\"," << format_sig(p[c]) << "\n";
    }
}

}  // namespace qcert
