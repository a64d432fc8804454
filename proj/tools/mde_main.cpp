#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "mde/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Parameter estimation for multiscale stochastic systems"};
    app.set_version_flag("--version", mde::expt::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int reps = 0;
    int threads = 0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path,
                        "experiment config file, or a manifest.json to replay")
            ->required();
        sub->add_option("--out", out_dir, "override the output directory");
        sub->add_option("--reps", reps, "override the replication count")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "override the master seed");
        sub->add_option("--threads", threads,
                        "worker threads (default: hardware concurrency)")
            ->check(CLI::NonNegativeNumber);
    };

    CLI::App* run = app.add_subcommand("run", "execute the configured experiment");
    CLI::App* rates = app.add_subcommand(
        "rates", "convergence-rate ladders (config with experiment = rates)");
    CLI::App* normality = app.add_subcommand(
        "normality",
        "centered-scaled estimate histogram (config with experiment = normality)");
    add_common(run);
    add_common(rates);
    add_common(normality);

    CLI11_PARSE(app, argc, argv);
    CLI::App* active = app.get_subcommands().front();

    try {
        mde::expt::ExperimentConfig cfg = mde::expt::load_config(config_path);
        if (active->count("--out")) cfg.output_dir = out_dir;
        if (active->count("--reps")) cfg.replications = reps;
        if (active->count("--seed")) cfg.master_seed = seed;
        if (active == rates && cfg.experiment != "rates")
            throw std::runtime_error("'mde rates' needs a config with experiment = rates");
        if (active == normality && cfg.experiment != "normality")
            throw std::runtime_error(
                "'mde normality' needs a config with experiment = normality");
        return mde::expt::run_experiment(cfg, threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
