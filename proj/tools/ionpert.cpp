// Command-line front end: figure reproduction, validation, parameter sweeps
// and single-run evolution with CSV/SVG output.

#include <CLI11.hpp>
#include <iostream>

#include "ionsim/driver.hpp"

namespace {

void add_common_flags(CLI::App* cmd, ionsim::RunConfig& config, std::string& config_path,
                      bool& print_only, std::string& initial) {
    cmd->add_option("--config", config_path, "flat key = value configuration file");
    cmd->add_option("--lambda", config.lambda, "perturbation parameter nu/Omega");
    cmd->add_option("--eta", config.eta, "Lamb-Dicke parameter");
    cmd->add_option("--kappa", config.kappa, "detuning in trap-frequency units");
    cmd->add_option("--alpha", config.alpha, "coherent-state amplitude");
    cmd->add_option("--order", config.order, "perturbative order (1 or 2)");
    cmd->add_option("--cutoff", config.fock_cutoff, "Fock-space cutoff");
    cmd->add_option("--tau-max", config.tau_max, "largest rescaled time");
    cmd->add_option("--tau-steps", config.tau_steps, "grid points in [0, tau_max]");
    cmd->add_option("--out-dir", config.out_dir, "output directory");
    cmd->add_option("--threads", config.threads, "sweep worker limit (0 = auto)");
    cmd->add_option("--initial", initial,
                    "initial state: coherent_excited | fock_ground:<n> | fock_excited:<n>");
    cmd->add_flag("--print-config", print_only, "print the effective configuration and exit");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trapped-ion high-intensity perturbative dynamics"};
    app.require_subcommand(1);

    ionsim::RunConfig config;
    std::string config_path;
    std::string initial;
    bool print_only = false;
    std::string lambdas, etas, alphas;

    auto* fig1 = app.add_subcommand("fig1", "excited-state probability comparison figures");
    auto* validate = app.add_subcommand("validate", "run every invariant suite");
    auto* sweep = app.add_subcommand("sweep", "comparison rows over a parameter grid");
    auto* evolve = app.add_subcommand("evolve", "single-run comparison series");

    for (auto* cmd : {fig1, validate, sweep, evolve})
        add_common_flags(cmd, config, config_path, print_only, initial);
    for (auto* cmd : {fig1, sweep}) {
        cmd->add_option("--lambdas", lambdas, "comma-separated lambda list");
    }
    sweep->add_option("--etas", etas, "comma-separated eta list");
    sweep->add_option("--alphas", alphas, "comma-separated alpha list");

    CLI11_PARSE(app, argc, argv);

    try {
        // precedence: defaults < config file < explicit flags; reapplying the
        // parsed flag values after the file keeps the file from overriding them
        if (!config_path.empty()) {
            ionsim::RunConfig file_config;
            ionsim::apply_config_file(file_config, config_path);
            ionsim::RunConfig defaults;
            auto keep = [&](auto member) {
                if (config.*member != defaults.*member) file_config.*member = config.*member;
            };
            keep(&ionsim::RunConfig::lambda);
            keep(&ionsim::RunConfig::eta);
            keep(&ionsim::RunConfig::kappa);
            keep(&ionsim::RunConfig::alpha);
            keep(&ionsim::RunConfig::order);
            keep(&ionsim::RunConfig::fock_cutoff);
            keep(&ionsim::RunConfig::tau_max);
            keep(&ionsim::RunConfig::tau_steps);
            keep(&ionsim::RunConfig::out_dir);
            keep(&ionsim::RunConfig::threads);
            config = file_config;
        }
        if (!initial.empty()) ionsim::apply_config_line(config, "initial", initial);
        if (!lambdas.empty()) ionsim::apply_config_line(config, "lambdas", lambdas);
        if (!etas.empty()) ionsim::apply_config_line(config, "etas", etas);
        if (!alphas.empty()) ionsim::apply_config_line(config, "alphas", alphas);

        if (print_only) {
            ionsim::print_config(std::cout, config);
            return 0;
        }
        if (fig1->parsed()) return ionsim::cmd_fig1(config, std::cout);
        if (validate->parsed()) return ionsim::cmd_validate(config, std::cout);
        if (sweep->parsed()) return ionsim::cmd_sweep(config, std::cout);
        if (evolve->parsed()) return ionsim::cmd_evolve(config, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
