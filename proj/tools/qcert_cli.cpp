#include <CLI11.hpp>
#include <iostream>

#include "qcert/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qcert: tilted Fermi-Hubbard spectra, dynamics, dephasing, and certification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "RNG seed (overrides config)")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--threads", threads, "worker threads (overrides config)");
    };

    std::map<std::string, qcert::ExperimentKind> kinds = {
        {"spectrum", qcert::ExperimentKind::Spectrum}, {"sweep", qcert::ExperimentKind::Sweep},
        {"evolve", qcert::ExperimentKind::Evolve},     {"lindblad", qcert::ExperimentKind::Lindblad},
        {"certify", qcert::ExperimentKind::Certify},
    };
    for (auto& [name, kind] : kinds) {
        add_shared(app.add_subcommand(name, name + " experiment"));
    }
    CLI::App* validate = app.add_subcommand("validate", "validate a config without running");
    add_shared(validate);

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    try {
        qcert::ExperimentConfig cfg = qcert::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed_set) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (name != "validate") cfg.kind = kinds.at(name);

        auto errors = qcert::validate_config(cfg);
        if (name == "validate") {
            if (errors.empty()) {
                std::cout << "ok\n";
                return 0;
            }
            for (const auto& e : errors) std::cout << "error: " << e << "\n";
            return 2;
        }
        return qcert::run_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
