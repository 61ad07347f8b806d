#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fpsg/config.hpp"
#include "fpsg/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic Galerkin solver for 1D Fokker-Planck equations with random inputs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int threads = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--output-dir", output_dir, "override the config's output directory");
        sub->add_option("--threads", threads, "parallel sweep entries")
            ->check(CLI::PositiveNumber);
    };
    CLI::App* cmd_run = app.add_subcommand("run", "single trajectory with per-time diagnostics");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "one run per sweep value plus a summary table");
    CLI::App* cmd_compare = app.add_subcommand(
        "compare-exact", "project the exact classical solution and compare with its order-50 truncation");
    add_common(cmd_run);
    add_common(cmd_sweep);
    add_common(cmd_compare);

    CLI11_PARSE(app, argc, argv);

    try {
        fpsg::RunConfig cfg = fpsg::parse_config_file(config_path);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (threads > 0) cfg.threads = threads;
        fpsg::RunMode mode = fpsg::RunMode::Run;
        if (cmd_sweep->parsed()) mode = fpsg::RunMode::Sweep;
        if (cmd_compare->parsed()) mode = fpsg::RunMode::CompareExact;
        return fpsg::execute(cfg, mode);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
