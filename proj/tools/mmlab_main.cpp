// mmlab command line: run experiments, generate synthetic data, validate
// datasets and pivot result tables. See README.md for the config format.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mmlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"market-making simulation laboratory"};
    app.require_subcommand(1);

    mmlab::cli::Invocation inv;
    std::int64_t seed = -1;

    auto add_common = [&](CLI::App* cmd, bool need_config, bool need_data, bool need_out) {
        auto* c = cmd->add_option("--config", inv.config_path, "experiment config (JSON)");
        if (need_config) c->required()->check(CLI::ExistingFile);
        auto* d = cmd->add_option("--data-dir", inv.data_dir,
                                  "directory dataset paths in the config are relative to");
        if (need_data) d->required();
        auto* o = cmd->add_option("--out", inv.out_dir, "output directory");
        if (need_out) o->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_flag("-v,--verbose", inv.verbosity, "more output; run also writes fills.csv");
    };

    auto* run = app.add_subcommand("run", "run the configured experiment matrix");
    add_common(run, true, false, true);
    auto* datagen = app.add_subcommand("datagen", "write synthetic datasets for regime markets");
    add_common(datagen, true, false, true);
    auto* validate = app.add_subcommand("validate", "validate configured datasets");
    add_common(validate, true, false, false);
    auto* report = app.add_subcommand("report", "pivot results.csv into per-family tables");
    add_common(report, false, true, true);

    CLI11_PARSE(app, argc, argv);

    inv.subcommand = app.get_subcommands().front()->get_name();
    if (seed >= 0) inv.seed = static_cast<std::uint64_t>(seed);
    return mmlab::cli::run_cli(inv, std::cout, std::cerr);
}
