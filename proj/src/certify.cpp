#include "qcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "qcert/opensys.hpp"
#include "qcert/util.hpp"

namespace qcert {

namespace {

SpinRankLabel parse_label(const std::string& label) {
    if (label.size() < 2) throw std::invalid_argument("bad state label: " + label);
    SpinRankLabel out;
    switch (label[0]) {
        case 'S': out.total_spin = 0; break;
        case 'T': out.total_spin = 1; break;
        case 'Q': out.total_spin = 2; break;
        default: throw std::invalid_argument("bad state label: " + label);
    }
    out.rank = std::stoi(label.substr(1));
    return out;
}

}  // namespace

ExpectedDistributions eigenstate_expectations(const Geometry& geometry, const ModelParams& params,
                                              const BasisSector& sector,
                                              const std::vector<std::string>& targets,
                                              const std::vector<double>& candidate_tilts,
                                              const LowSpectrumOptions& solver) {
    ExpectedDistributions out;
    out.targets = targets;
    out.candidate_tilts = candidate_tilts;
    out.configs = build_charge_configs(sector);
    out.dist.assign(targets.size(),
                    std::vector<Eigen::VectorXd>(candidate_tilts.size(),
                                                 Eigen::VectorXd::Zero(out.configs.count())));

    auto parts = build_hamiltonian_parts(geometry, params, sector);
    SparseHermitian s2 = build_spin_squared(sector);
    std::vector<SpinRankLabel> labels;
    labels.reserve(targets.size());
    for (const auto& t : targets) labels.push_back(parse_label(t));

    for (size_t ti = 0; ti < candidate_tilts.size(); ++ti) {
        auto recs = low_spectrum(parts.at(candidate_tilts[ti]), s2, sector, solver);
        for (size_t g = 0; g < targets.size(); ++g) {
            const EigenstateRecord* hit = nullptr;
            for (const auto& r : recs) {
                if (r.total_spin == labels[g].total_spin && r.spin_rank == labels[g].rank) hit = &r;
            }
            if (!hit) {
                throw std::invalid_argument("eigenstate_expectations: target " + targets[g] +
                                            " not found at eps=" + format_sig(candidate_tilts[ti], 6));
            }
            Eigen::VectorXd p = charge_distribution_of_vector(hit->vector, out.configs);
            if (labels[g].rank == 1) {
                // adiabatically tracked states measure as their dominant configuration
                int imax = 0;
                p.maxCoeff(&imax);
                p.setZero();
                p[imax] = 1.0;
            }
            out.dist[g][ti] = std::move(p);
        }
    }
    return out;
}

namespace {

bool pair_separated(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double threshold,
                    double floor) {
    return kl_distance(p, q, floor) >= threshold && kl_distance(q, p, floor) >= threshold;
}

}  // namespace

CertificationPlan plan_tilts(const ExpectedDistributions& exp, double threshold) {
    const int ntarget = int(exp.targets.size());
    const int ncand = int(exp.candidate_tilts.size());
    if (ntarget < 2) throw std::invalid_argument("plan_tilts: need at least two targets");
    if (ncand < 1) throw std::invalid_argument("plan_tilts: empty candidate grid");
    if (threshold <= 0) throw std::invalid_argument("plan_tilts: threshold must be positive");

    CertificationPlan plan;
    plan.targets = exp.targets;
    plan.configs = exp.configs;
    plan.kl_threshold = threshold;

    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < ntarget; ++a) {
        for (int b = a + 1; b < ntarget; ++b) pairs.emplace_back(a, b);
    }
    // separation matrix: candidate x pair
    std::vector<std::vector<bool>> separates(ncand, std::vector<bool>(pairs.size(), false));
    for (int c = 0; c < ncand; ++c) {
        for (size_t pi = 0; pi < pairs.size(); ++pi) {
            separates[c][pi] = pair_separated(exp.dist[pairs[pi].first][c],
                                              exp.dist[pairs[pi].second][c], threshold,
                                              plan.kl_floor);
        }
    }

    std::set<size_t> unresolved;
    for (size_t pi = 0; pi < pairs.size(); ++pi) unresolved.insert(pi);
    std::vector<int> chosen;
    while (!unresolved.empty()) {
        int best = -1;
        int best_count = 0;
        for (int c = 0; c < ncand; ++c) {
            int count = 0;
            for (size_t pi : unresolved) count += separates[c][pi] ? 1 : 0;
            // strict > keeps the smaller tilt on ties
            if (count > best_count) {
                best_count = count;
                best = c;
            }
        }
        if (best < 0) break;  // nothing separates any remaining pair
        chosen.push_back(best);
        for (auto it = unresolved.begin(); it != unresolved.end();) {
            if (separates[best][*it]) {
                it = unresolved.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::sort(chosen.begin(), chosen.end());
    for (int c : chosen) {
        plan.tilts.push_back(exp.candidate_tilts[c]);
    }
    plan.expected.assign(ntarget, {});
    for (int g = 0; g < ntarget; ++g) {
        for (int c : chosen) plan.expected[g].push_back(exp.dist[g][c]);
    }
    plan.complete = unresolved.empty();
    for (size_t pi : unresolved) {
        plan.unresolved_pairs.emplace_back(exp.targets[pairs[pi].first],
                                           exp.targets[pairs[pi].second]);
    }
    return plan;
}

bool single_tilt_suffices(const ExpectedDistributions& exp, double threshold) {
    const int ntarget = int(exp.targets.size());
    for (int c = 0; c < int(exp.candidate_tilts.size()); ++c) {
        bool all = true;
        for (int a = 0; a < ntarget && all; ++a) {
            for (int b = a + 1; b < ntarget && all; ++b) {
                if (!pair_separated(exp.dist[a][c], exp.dist[b][c], threshold, 1e-12)) all = false;
            }
        }
        if (all) return true;
    }
    return false;
}

ClassifyResult classify_outcome(const std::vector<std::vector<int>>& outcomes,
                                const CertificationPlan& plan) {
    if (outcomes.size() != plan.tilts.size()) {
        throw std::invalid_argument("classify_outcome: outcome count must equal plan tilt count");
    }
    std::vector<int> alive(plan.targets.size());
    for (size_t g = 0; g < alive.size(); ++g) alive[g] = int(g);

    for (size_t t = 0; t < plan.tilts.size() && alive.size() > 1; ++t) {
        // measured configuration index; unknown tuples match no support
        int cfg_id = -1;
        for (int c = 0; c < plan.configs.count(); ++c) {
            if (plan.configs.configs[c] == outcomes[t]) {
                cfg_id = c;
                break;
            }
        }
        std::vector<int> next;
        for (int g : alive) {
            if (cfg_id >= 0 && plan.expected[g][t][cfg_id] > plan.support_floor) next.push_back(g);
        }
        alive = std::move(next);
    }
    if (alive.empty()) return {Classification::Unrecognized, {}};
    if (alive.size() == 1) return {Classification::Label, plan.targets[alive[0]]};
    return {Classification::Ambiguous, {}};
}

ConfusionMatrix simulate_protocol(const CertificationPlan& plan,
                                  const std::vector<std::vector<Eigen::VectorXd>>& true_dist,
                                  int shots_per_tilt, int trials, uint64_t seed) {
    if (shots_per_tilt < 1) throw std::invalid_argument("simulate_protocol: M must be >= 1");
    if (trials < 1) throw std::invalid_argument("simulate_protocol: trials must be >= 1");
    if (true_dist.size() != plan.targets.size()) {
        throw std::invalid_argument("simulate_protocol: one distribution set per target required");
    }

    ConfusionMatrix cm;
    cm.targets = plan.targets;
    cm.counts = Eigen::MatrixXi::Zero(int(plan.targets.size()), int(plan.targets.size()) + 2);

    for (size_t g = 0; g < plan.targets.size(); ++g) {
        for (int trial = 0; trial < trials; ++trial) {
            std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (g * 1000003ULL + trial + 1)));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            std::vector<std::vector<int>> outcome;
            for (size_t t = 0; t < plan.tilts.size(); ++t) {
                const Eigen::VectorXd& p = true_dist[g][t];
                std::vector<int> tally(p.size(), 0);
                for (int shot = 0; shot < shots_per_tilt; ++shot) {
                    double u = unif(rng);
                    double acc = 0.0;
                    int pick = int(p.size()) - 1;
                    for (int c = 0; c < p.size(); ++c) {
                        acc += p[c];
                        if (u <= acc) {
                            pick = c;
                            break;
                        }
                    }
                    ++tally[pick];
                }
                int modal = int(std::max_element(tally.begin(), tally.end()) - tally.begin());
                outcome.push_back(plan.configs.configs[modal]);
            }
            ClassifyResult r = classify_outcome(outcome, plan);
            if (r.kind == Classification::Label) {
                int col = int(std::find(plan.targets.begin(), plan.targets.end(), r.label) -
                              plan.targets.begin());
                cm.counts(int(g), col) += 1;
            } else if (r.kind == Classification::Ambiguous) {
                cm.counts(int(g), cm.ambiguous_col()) += 1;
            } else {
                cm.counts(int(g), cm.unrecognized_col()) += 1;
            }
        }
    }
    return cm;
}

double hyperfine_mixing_rate(double hyperfine_coupling, double gap) {
    if (gap <= 0.0) throw std::invalid_argument("hyperfine_mixing_rate: gap must be positive");
    return hyperfine_coupling * hyperfine_coupling / gap;
}

void write_plan_json(const CertificationPlan& plan, const std::string& path,
                     const std::string& metadata_comment) {
    nlohmann::json j;
    j["metadata"] = metadata_comment;
    j["tilts"] = plan.tilts;
    j["targets"] = plan.targets;
    j["kl_threshold"] = plan.kl_threshold;
    j["kl_floor"] = plan.kl_floor;
    j["support_floor"] = plan.support_floor;
    j["complete"] = plan.complete;
    nlohmann::json unresolved = nlohmann::json::array();
    for (const auto& [a, b] : plan.unresolved_pairs) unresolved.push_back({a, b});
    j["unresolved_pairs"] = unresolved;

    nlohmann::json expected;
    for (size_t g = 0; g < plan.targets.size(); ++g) {
        nlohmann::json per_tilt = nlohmann::json::array();
        for (size_t t = 0; t < plan.tilts.size(); ++t) {
            nlohmann::json support = nlohmann::json::array();
            for (int c = 0; c < plan.configs.count(); ++c) {
                if (plan.expected[g][t][c] > plan.support_floor) {
                    support.push_back({{"config", plan.configs.configs[c]},
                                       {"p", plan.expected[g][t][c]}});
                }
            }
            per_tilt.push_back(support);
        }
        expected[plan.targets[g]] = per_tilt;
    }
    j["expected"] = expected;

    // decision rules: outcome support -> label, in measurement order
    nlohmann::json rules = nlohmann::json::array();
    for (size_t t = 0; t < plan.tilts.size(); ++t) {
        nlohmann::json rule;
        rule["tilt"] = plan.tilts[t];
        nlohmann::json keep;
        for (size_t g = 0; g < plan.targets.size(); ++g) {
            std::vector<std::vector<int>> support;
            for (int c = 0; c < plan.configs.count(); ++c) {
                if (plan.expected[g][t][c] > plan.support_floor) {
                    support.push_back(plan.configs.configs[c]);
                }
            }
            keep[plan.targets[g]] = support;
        }
        rule["consistent_outcomes"] = keep;
        rules.push_back(rule);
    }
    j["decision_rules"] = rules;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_plan_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::string& path,
                         const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_confusion_csv: cannot open " + path);
    out << metadata;
    out << "true_state";
    for (const auto& t : cm.targets) out << "," << t;
    out << ",ambiguous,unrecognized\n";
    for (int r = 0; r < cm.counts.rows(); ++r) {
        out << cm.targets[r];
        for (int c = 0; c < cm.counts.cols(); ++c) out << "," << cm.counts(r, c);
        out << "\n";
    }
}

}  // namespace qcert
