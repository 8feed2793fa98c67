#include <CLI11.hpp>

#include <iostream>

#include "sselab/commands.hpp"
#include "sselab/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stochastic Schrodinger equation laboratory on truncated Fock spaces"};
    app.require_subcommand(1);

    sselab::CommandOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "experiment config file")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_flag("--enforce", opt.enforce, "nonzero exit status when checks fail");
    };

    auto* sim = app.add_subcommand("simulate", "run a trajectory ensemble");
    add_common(sim);
    sim->add_flag("--traj-csv", opt.traj_csv, "write per-trajectory CSV files");

    auto* cmp = app.add_subcommand("compare",
                                   "direct NSSE vs weighted-linear vs master-equation oracle");
    add_common(cmp);

    auto* cri = app.add_subcommand("criteria", "growth/Lyapunov constants and parameter predicates");
    add_common(cri);

    auto* std_ = app.add_subcommand("steady", "stationary state and long-run time averages");
    add_common(std_);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return sselab::cmd_simulate(opt);
        if (cmp->parsed()) return sselab::cmd_compare(opt);
        if (cri->parsed()) return sselab::cmd_criteria(opt);
        if (std_->parsed()) return sselab::cmd_steady(opt);
    } catch (const sselab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const sselab::BlowUpError& e) {
        std::cerr << "solver blow-up: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
