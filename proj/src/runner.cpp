#include "qcert/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "qcert/certify.hpp"
#include "qcert/dynamics.hpp"
#include "qcert/opensys.hpp"
#include "qcert/spectral.hpp"
#include "qcert/util.hpp"

namespace qcert {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where,
                    std::vector<std::string>& errors) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            errors.push_back("unknown key '" + it.key() + "' in " + where);
        }
    }
}

std::vector<double> make_grid(double start, double stop, double step) {
    std::vector<double> g;
    for (int i = 0;; ++i) {
        double v = start + i * step;
        if (v > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
        g.push_back(std::min(v, stop));
    }
    return g;
}

SpinRankLabel parse_state_label(const std::string& label) {
    SpinRankLabel out;
    if (label.size() < 2) throw std::runtime_error("bad state label: " + label);
    switch (label[0]) {
        case 'S': out.total_spin = 0; break;
        case 'T': out.total_spin = 1; break;
        case 'Q': out.total_spin = 2; break;
        default: throw std::runtime_error("bad state label: " + label);
    }
    out.rank = std::stoi(label.substr(1));
    return out;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error: " + std::string(e.what()));
    }

    ExperimentConfig cfg;
    cfg.raw_json = j.dump();
    std::vector<std::string> errors;

    reject_unknown(j,
                   {"geometry", "params", "experiment", "spectrum", "sweep", "evolve", "lindblad",
                    "certify", "output_dir", "seed", "threads", "solver_tol"},
                   "config root", errors);

    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        reject_unknown(g, {"kind", "sites", "cols"}, "geometry", errors);
        std::string kind = g.value("kind", "chain");
        if (kind == "chain") {
            cfg.geometry_kind = Geometry::Kind::Chain;
            cfg.sites = g.value("sites", 4);
        } else if (kind == "ladder") {
            cfg.geometry_kind = Geometry::Kind::Ladder;
            cfg.sites = g.value("cols", 4);
        } else {
            errors.push_back("geometry.kind must be 'chain' or 'ladder'");
        }
    }
    if (j.contains("params")) {
        const auto& p = j["params"];
        reject_unknown(p, {"t", "U", "V"}, "params", errors);
        cfg.params.t = p.value("t", 1.0);
        cfg.params.U = p.value("U", 40.0);
        cfg.params.V = p.value("V", 10.0);
    }

    std::string kind = j.value("experiment", "spectrum");
    if (kind == "spectrum") cfg.kind = ExperimentKind::Spectrum;
    else if (kind == "sweep") cfg.kind = ExperimentKind::Sweep;
    else if (kind == "evolve") cfg.kind = ExperimentKind::Evolve;
    else if (kind == "lindblad") cfg.kind = ExperimentKind::Lindblad;
    else if (kind == "certify") cfg.kind = ExperimentKind::Certify;
    else errors.push_back("experiment must be one of spectrum|sweep|evolve|lindblad|certify");

    if (j.contains("spectrum")) {
        const auto& s = j["spectrum"];
        reject_unknown(s, {"epsilon", "k"}, "spectrum", errors);
        cfg.spectrum_epsilon = s.value("epsilon", 0.0);
        cfg.spectrum_k = s.value("k", 8);
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        reject_unknown(s, {"eps_start", "eps_stop", "eps_step", "k", "gap_floor"}, "sweep", errors);
        cfg.eps_start = s.value("eps_start", 0.0);
        cfg.eps_stop = s.value("eps_stop", 70.0);
        cfg.eps_step = s.value("eps_step", 0.25);
        cfg.sweep_k = s.value("k", 8);
        cfg.gap_floor = s.value("gap_floor", 0.05);
    }
    if (j.contains("evolve")) {
        const auto& e = j["evolve"];
        reject_unknown(e, {"initial", "t_max", "eps_max", "hold", "tol", "samples"}, "evolve",
                       errors);
        if (e.contains("initial")) {
            cfg.initial_states.clear();
            if (e["initial"].is_string()) {
                cfg.initial_states.push_back(e["initial"].get<std::string>());
            } else {
                for (const auto& v : e["initial"]) cfg.initial_states.push_back(v.get<std::string>());
            }
        }
        cfg.t_max = e.value("t_max", 2e4);
        cfg.eps_max = e.value("eps_max", 70.0);
        cfg.hold = e.value("hold", 0.0);
        cfg.evolve_tol = e.value("tol", 1e-8);
        cfg.samples = e.value("samples", 500);
    }
    if (j.contains("lindblad")) {
        const auto& l = j["lindblad"];
        reject_unknown(l, {"initial", "gamma", "t_max", "eps_max", "hold", "tol", "samples",
                           "spin_block"},
                       "lindblad", errors);
        if (l.contains("initial")) {
            cfg.initial_states.clear();
            if (l["initial"].is_string()) {
                cfg.initial_states.push_back(l["initial"].get<std::string>());
            } else {
                for (const auto& v : l["initial"]) cfg.initial_states.push_back(v.get<std::string>());
            }
        }
        if (l.contains("gamma")) {
            cfg.gammas.clear();
            if (l["gamma"].is_number()) {
                cfg.gammas.push_back(l["gamma"].get<double>());
            } else {
                for (const auto& v : l["gamma"]) cfg.gammas.push_back(v.get<double>());
            }
        }
        cfg.t_max = l.value("t_max", 2e4);
        cfg.eps_max = l.value("eps_max", 70.0);
        cfg.hold = l.value("hold", 1e3);
        cfg.lindblad_tol = l.value("tol", 1e-7);
        cfg.samples = l.value("samples", 500);
        cfg.spin_block = l.value("spin_block", true);
    }
    if (j.contains("certify")) {
        const auto& c = j["certify"];
        reject_unknown(c,
                       {"targets", "kl_threshold", "candidate_start", "candidate_stop",
                        "candidate_step", "simulate", "M", "trials", "gamma", "t_max", "eps_max",
                        "hold"},
                       "certify", errors);
        if (c.contains("targets")) {
            cfg.targets.clear();
            for (const auto& v : c["targets"]) cfg.targets.push_back(v.get<std::string>());
        }
        cfg.kl_threshold = c.value("kl_threshold", 1.0);
        cfg.candidate_start = c.value("candidate_start", 5.0);
        cfg.candidate_stop = c.value("candidate_stop", 70.0);
        cfg.candidate_step = c.value("candidate_step", 0.25);
        cfg.simulate = c.value("simulate", false);
        cfg.shots_per_tilt = c.value("M", 100);
        cfg.trials = c.value("trials", 100);
        cfg.simulate_gamma = c.value("gamma", 0.0);
        cfg.t_max = c.value("t_max", cfg.t_max);
        cfg.eps_max = c.value("eps_max", cfg.eps_max);
        cfg.hold = c.value("hold", cfg.hold);
    }

    cfg.output_dir = j.value("output_dir", "out");
    cfg.seed = j.value("seed", uint64_t(1));
    cfg.threads = j.value("threads", 1);
    cfg.solver_tol = j.value("solver_tol", 1e-9);

    if (!errors.empty()) {
        std::string msg = "config schema errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::runtime_error(msg);
    }
    return cfg;
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
    std::vector<std::string> errors;
    auto finite = [](double v) { return std::isfinite(v); };

    if (c.geometry_kind == Geometry::Kind::Chain) {
        if (c.sites < 2 || c.sites > 32) errors.push_back("geometry.sites must be in [2, 32]");
        else if (c.sites % 2 != 0) errors.push_back("geometry.sites must be even for chains");
    } else {
        if (c.sites < 2 || 2 * c.sites > 32) errors.push_back("geometry.cols must be in [2, 16]");
    }
    if (!finite(c.params.t) || c.params.t <= 0) errors.push_back("params.t must be positive");
    if (!finite(c.params.U) || c.params.U < 0) errors.push_back("params.U must be >= 0");
    if (!finite(c.params.V) || c.params.V < 0) errors.push_back("params.V must be >= 0");

    switch (c.kind) {
        case ExperimentKind::Spectrum:
            if (!finite(c.spectrum_epsilon) || c.spectrum_epsilon < 0) {
                errors.push_back("spectrum.epsilon must be >= 0");
            }
            if (c.spectrum_k < 1) errors.push_back("spectrum.k must be >= 1");
            break;
        case ExperimentKind::Sweep:
            if (!finite(c.eps_start) || c.eps_start < 0) errors.push_back("sweep.eps_start must be >= 0");
            if (!finite(c.eps_stop) || c.eps_stop <= c.eps_start) {
                errors.push_back("sweep.eps_stop must exceed eps_start");
            }
            if (!finite(c.eps_step) || c.eps_step <= 0) errors.push_back("sweep.eps_step must be > 0");
            if (c.sweep_k < 2) errors.push_back("sweep.k must be >= 2");
            break;
        case ExperimentKind::Evolve:
        case ExperimentKind::Lindblad:
            if (c.initial_states.empty()) errors.push_back("evolve.initial must name at least one state");
            if (!finite(c.t_max) || c.t_max <= 0) errors.push_back("t_max must be > 0");
            if (!finite(c.eps_max) || c.eps_max < 0) errors.push_back("eps_max must be >= 0");
            if (!finite(c.hold) || c.hold < 0) errors.push_back("hold must be >= 0");
            if (c.samples < 2) errors.push_back("samples must be >= 2");
            if (c.kind == ExperimentKind::Lindblad) {
                if (c.gammas.empty()) errors.push_back("lindblad.gamma must name at least one rate");
                for (double g : c.gammas) {
                    if (!finite(g) || g < 0) errors.push_back("lindblad.gamma entries must be >= 0");
                }
            }
            break;
        case ExperimentKind::Certify:
            if (c.targets.size() < 2) errors.push_back("certify.targets needs at least two states");
            if (c.kl_threshold <= 0) errors.push_back("certify.kl_threshold must be > 0");
            if (c.candidate_step <= 0) errors.push_back("certify.candidate_step must be > 0");
            if (c.candidate_stop <= c.candidate_start) {
                errors.push_back("certify.candidate_stop must exceed candidate_start");
            }
            if (c.simulate) {
                if (c.shots_per_tilt < 1) errors.push_back("certify.M must be >= 1");
                if (c.trials < 1) errors.push_back("certify.trials must be >= 1");
                if (c.simulate_gamma < 0) errors.push_back("certify.gamma must be >= 0");
            }
            break;
    }
    if (c.threads < 1) errors.push_back("threads must be >= 1");
    if (!finite(c.solver_tol) || c.solver_tol <= 0) errors.push_back("solver_tol must be > 0");
    return errors;
}

namespace {

std::string metadata_header(const ExperimentConfig& cfg, const std::string& extra = "") {
    std::string m;
    m += "# qcert output\n";
    m += "# config = " + cfg.raw_json + "\n";
    m += "# seed = " + std::to_string(cfg.seed) + "\n";
    if (!extra.empty()) m += extra;
    return m;
}

Geometry make_geometry(const ExperimentConfig& cfg) {
    return cfg.geometry_kind == Geometry::Kind::Chain ? Geometry::chain(cfg.sites)
                                                      : Geometry::ladder(cfg.sites);
}

struct RunContext {
    Geometry geometry;
    BasisSector sector;
    ExperimentConfig cfg;
    std::filesystem::path out;
};

const EigenstateRecord* find_record(const std::vector<EigenstateRecord>& recs,
                                    const SpinRankLabel& label) {
    for (const auto& r : recs) {
        if (r.total_spin == label.total_spin && r.spin_rank == label.rank) return &r;
    }
    return nullptr;
}

int run_spectrum(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    SparseHermitian h = build_hamiltonian(ctx.geometry, cfg.params, cfg.spectrum_epsilon, ctx.sector);
    SparseHermitian s2 = build_spin_squared(ctx.sector);
    LowSpectrumOptions lo;
    lo.k = cfg.spectrum_k;
    lo.tol = cfg.solver_tol;
    lo.seed = cfg.seed;
    auto recs = low_spectrum(h, s2, ctx.sector, lo);

    std::ofstream out(ctx.out / "spectrum.csv");
    out << metadata_header(cfg);
    out << "state,energy,total_spin";
    for (int s = 1; s <= ctx.sector.sites(); ++s) out << ",n_" << s;
    out << "\n";
    for (const auto& r : recs) {
        out << r.label() << "," << format_sig(r.energy) << "," << r.total_spin;
        for (int s = 0; s < ctx.sector.sites(); ++s) out << "," << format_sig(r.charge_profile[s]);
        out << "\n";
    }
    return 0;
}

int run_sweep(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto grid = make_grid(cfg.eps_start, cfg.eps_stop, cfg.eps_step);
    SweepOptions so;
    so.k = cfg.sweep_k;
    so.tol = cfg.solver_tol;
    so.threads = cfg.threads;
    so.seed = cfg.seed;
    SweepTable table = sweep_spectrum(ctx.geometry, cfg.params, grid, ctx.sector, so);
    write_sweep_csv(table, ctx.sector.sites(), (ctx.out / "sweep.csv").string(),
                    metadata_header(cfg));

    // anti-crossings and minimum gaps per spin sector present in the table
    std::set<int> spins;
    for (const auto& r : table.points.front().records) spins.insert(r.total_spin);
    std::ofstream gaps(ctx.out / "gaps.csv");
    gaps << metadata_header(cfg);
    gaps << "total_spin,min_gap,eps_at_min\n";
    std::ofstream acs(ctx.out / "anticrossings.csv");
    acs << metadata_header(cfg);
    acs << "total_spin,eps,gap\n";
    for (int s : spins) {
        MinGapOptions mg;
        mg.gap_floor = cfg.gap_floor;
        try {
            auto crossings = detect_anticrossings(table, s, ctx.geometry, cfg.params, ctx.sector,
                                                  so, mg.anticross);
            for (const auto& c : crossings) {
                acs << s << "," << format_sig(c.epsilon) << "," << format_sig(c.gap) << "\n";
            }
            auto g = min_gap(table, s, ctx.geometry, cfg.params, ctx.sector, so, mg);
            gaps << s << "," << format_sig(g.gap) << "," << format_sig(g.epsilon) << "\n";
        } catch (const std::invalid_argument&) {
            // spin sector without a rank-2 state in the window: skip
        }
    }
    return 0;
}

int run_evolve(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    SparseHermitian h0 = build_hamiltonian(ctx.geometry, cfg.params, 0.0, ctx.sector);
    SparseHermitian s2 = build_spin_squared(ctx.sector);
    LowSpectrumOptions lo;
    lo.k = 8;
    lo.tol = cfg.solver_tol;
    lo.seed = cfg.seed;
    auto recs0 = low_spectrum(h0, s2, ctx.sector, lo);

    TiltSchedule sched{cfg.t_max, cfg.eps_max, cfg.hold};
    for (const auto& name : cfg.initial_states) {
        SpinRankLabel label = parse_state_label(name);
        const EigenstateRecord* rec = find_record(recs0, label);
        if (!rec) throw std::runtime_error("initial state " + name + " not found at eps=0");

        EvolveOptions eo;
        eo.integrator.tol = cfg.evolve_tol;
        eo.samples = cfg.samples;
        eo.track = label;
        StateTrajectory traj = evolve_state(rec->vector.cast<std::complex<double>>(), ctx.geometry,
                                            cfg.params, sched, ctx.sector, eo);
        write_trajectory_csv(traj, ctx.sector.sites(),
                             (ctx.out / ("evolve_" + name + ".csv")).string(),
                             metadata_header(cfg, "# initial = " + name + "\n"));
        if (cfg.hold > 0) {
            Eigen::VectorXd avg = time_averaged_charge(traj, cfg.t_max, sched.total_time());
            std::ofstream out(ctx.out / ("hold_average_" + name + ".csv"));
            out << metadata_header(cfg, "# initial = " + name + "\n");
            out << "site,n_avg\n";
            for (int s = 0; s < avg.size(); ++s) {
                out << (s + 1) << "," << format_sig(avg[s]) << "\n";
            }
        }
    }
    return 0;
}

int run_lindblad(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    SparseHermitian h0 = build_hamiltonian(ctx.geometry, cfg.params, 0.0, ctx.sector);
    SparseHermitian s2 = build_spin_squared(ctx.sector);
    LowSpectrumOptions lo;
    lo.k = 8;
    lo.tol = cfg.solver_tol;
    lo.seed = cfg.seed;
    auto recs0 = low_spectrum(h0, s2, ctx.sector, lo);
    TiltSchedule sched{cfg.t_max, cfg.eps_max, cfg.hold};

    // distance table between all initial-state pairs at every gamma
    std::vector<std::vector<Eigen::VectorXd>> final_dists(cfg.initial_states.size());

    for (size_t si = 0; si < cfg.initial_states.size(); ++si) {
        const auto& name = cfg.initial_states[si];
        SpinRankLabel label = parse_state_label(name);
        const EigenstateRecord* rec = find_record(recs0, label);
        if (!rec) throw std::runtime_error("initial state " + name + " not found at eps=0");

        DephasingFrame frame =
            cfg.spin_block ? spin_block_frame(ctx.geometry, cfg.params, ctx.sector, label.total_spin)
                           : full_frame(ctx.geometry, cfg.params, ctx.sector);
        Eigen::VectorXcd psi0 = to_frame(frame, rec->vector.cast<std::complex<double>>());

        for (double gamma : cfg.gammas) {
            LindbladOptions lopt;
            lopt.tol = cfg.lindblad_tol;
            lopt.samples = cfg.samples;
            LindbladResult res = evolve_lindblad(DensityMatrix::pure(psi0), frame, sched, gamma, lopt);
            std::string tag = name + "_gamma" + format_sig(gamma, 6);
            write_lindblad_csv(res.samples, ctx.sector.sites(),
                               (ctx.out / ("lindblad_" + tag + ".csv")).string(),
                               metadata_header(cfg, "# initial = " + name + "\n# gamma = " +
                                                        format_sig(gamma, 6) + "\n"));
            Eigen::VectorXd p = charge_distribution(res.final_state, frame);
            write_distribution_csv(p, frame.configs,
                                   (ctx.out / ("distribution_" + tag + ".csv")).string(),
                                   metadata_header(cfg, "# kl_floor = 1e-12\n"));
            final_dists[si].push_back(p);
        }
    }

    // pairwise KL distances at matching gamma values
    std::ofstream out(ctx.out / "distances.csv");
    out << metadata_header(cfg, "# kl_floor = 1e-12\n");
    out << "state_p,state_q,gamma,d_bits\n";
    for (size_t a = 0; a < cfg.initial_states.size(); ++a) {
        for (size_t b = 0; b < cfg.initial_states.size(); ++b) {
            if (a == b) continue;
            for (size_t gi = 0; gi < cfg.gammas.size(); ++gi) {
                double d = kl_distance(final_dists[a][gi], final_dists[b][gi]);
                out << cfg.initial_states[a] << "," << cfg.initial_states[b] << ","
                    << format_sig(cfg.gammas[gi], 6) << "," << format_sig(d) << "\n";
            }
        }
    }
    return 0;
}

int run_certify(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto candidates = make_grid(cfg.candidate_start, cfg.candidate_stop, cfg.candidate_step);
    LowSpectrumOptions lo;
    lo.k = 8;
    lo.tol = cfg.solver_tol;
    lo.seed = cfg.seed;
    ExpectedDistributions exp =
        eigenstate_expectations(ctx.geometry, cfg.params, ctx.sector, cfg.targets, candidates, lo);
    CertificationPlan plan = plan_tilts(exp, cfg.kl_threshold);
    write_plan_json(plan, (ctx.out / "plan.json").string(), cfg.raw_json);

    if (!plan.complete) {
        std::cerr << "certify: unresolved pairs remain:";
        for (const auto& [a, b] : plan.unresolved_pairs) std::cerr << " (" << a << "," << b << ")";
        std::cerr << "\n";
    }

    if (cfg.simulate && plan.complete) {
        // true outcome distributions from the evolved dynamics at each tilt
        std::vector<std::vector<Eigen::VectorXd>> true_dist(cfg.targets.size());
        double rate = cfg.eps_max / cfg.t_max;
        SparseHermitian h0 = build_hamiltonian(ctx.geometry, cfg.params, 0.0, ctx.sector);
        SparseHermitian s2 = build_spin_squared(ctx.sector);
        auto recs0 = low_spectrum(h0, s2, ctx.sector, lo);
        for (size_t g = 0; g < cfg.targets.size(); ++g) {
            SpinRankLabel label = parse_state_label(cfg.targets[g]);
            const EigenstateRecord* rec = find_record(recs0, label);
            if (!rec) throw std::runtime_error("target " + cfg.targets[g] + " not found at eps=0");
            for (double tilt : plan.tilts) {
                TiltSchedule sched{tilt / rate, tilt, cfg.hold > 0 ? cfg.hold : 1e3};
                if (cfg.simulate_gamma > 0) {
                    DephasingFrame frame =
                        cfg.spin_block
                            ? spin_block_frame(ctx.geometry, cfg.params, ctx.sector, label.total_spin)
                            : full_frame(ctx.geometry, cfg.params, ctx.sector);
                    Eigen::VectorXcd psi0 = to_frame(frame, rec->vector.cast<std::complex<double>>());
                    LindbladOptions lopt;
                    lopt.tol = cfg.lindblad_tol;
                    lopt.samples = 100;
                    LindbladResult res = evolve_lindblad(DensityMatrix::pure(psi0), frame, sched,
                                                         cfg.simulate_gamma, lopt);
                    true_dist[g].push_back(charge_distribution(res.final_state, frame));
                } else if (label.rank == 1) {
                    // adiabatic tracking measures the dominant configuration
                    true_dist[g].push_back(exp.dist[g][std::min_element(
                                                           candidates.begin(), candidates.end(),
                                                           [&](double a, double b) {
                                                               return std::abs(a - tilt) <
                                                                      std::abs(b - tilt);
                                                           }) -
                                                       candidates.begin()]);
                } else {
                    EvolveOptions eo;
                    eo.integrator.tol = cfg.evolve_tol;
                    eo.samples = cfg.samples;
                    StateTrajectory traj =
                        evolve_state(rec->vector.cast<std::complex<double>>(), ctx.geometry,
                                     cfg.params, sched, ctx.sector, eo);
                    // average the sampled configuration distribution over the hold
                    auto table = build_charge_configs(ctx.sector);
                    Eigen::VectorXd acc = Eigen::VectorXd::Zero(table.count());
                    int count = 0;
                    for (size_t i = 0; i < traj.times.size(); ++i) {
                        if (traj.times[i] < sched.t_max) continue;
                        Eigen::VectorXd pv = Eigen::VectorXd::Zero(table.count());
                        for (int b = 0; b < ctx.sector.dimension(); ++b) {
                            pv[table.config_of_state[b]] += std::norm(traj.states[i][b]);
                        }
                        acc += pv;
                        ++count;
                    }
                    true_dist[g].push_back(acc / std::max(1, count));
                }
            }
        }
        ConfusionMatrix cm =
            simulate_protocol(plan, true_dist, cfg.shots_per_tilt, cfg.trials, cfg.seed);
        write_confusion_csv(cm, (ctx.out / "confusion.csv").string(), metadata_header(cfg));
    }
    return plan.complete ? 0 : 3;
}

}  // namespace

int run_config(const ExperimentConfig& cfg) {
    auto errors = validate_config(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 2;
    }
    RunContext ctx{make_geometry(cfg),
                   enumerate_sector(cfg.geometry_kind == Geometry::Kind::Chain ? cfg.sites
                                                                               : 2 * cfg.sites,
                                    (cfg.geometry_kind == Geometry::Kind::Chain ? cfg.sites
                                                                                : 2 * cfg.sites) /
                                        2,
                                    (cfg.geometry_kind == Geometry::Kind::Chain ? cfg.sites
                                                                                : 2 * cfg.sites) /
                                        2),
                   cfg,
                   std::filesystem::path(cfg.output_dir)};
    std::filesystem::create_directories(ctx.out);

    try {
        switch (cfg.kind) {
            case ExperimentKind::Spectrum: return run_spectrum(ctx);
            case ExperimentKind::Sweep: return run_sweep(ctx);
            case ExperimentKind::Evolve: return run_evolve(ctx);
            case ExperimentKind::Lindblad: return run_lindblad(ctx);
            case ExperimentKind::Certify: return run_certify(ctx);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace qcert
