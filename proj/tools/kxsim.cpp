#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kxsim/harness.hpp"

namespace {

constexpr int exit_usage = 2;
constexpr int exit_run_failure = 3;

struct CommonFlags {
    std::string config;
    std::uint64_t seed = 0;
    std::vector<std::string> sets;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "flat JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed (base seed for presets)");
    cmd->add_option("--set", f.sets, "override a config key, key=value (repeatable)")->allow_extra_args(false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based software service market simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "execute a single run");
    add_common(run_cmd, run_flags);
    run_cmd->add_option("--out", run_flags.out, "artifact directory")->required();

    CommonFlags preset_flags;
    std::string preset_name;
    std::size_t jobs = 1, fast = 1, seeds = 0;
    auto* preset_cmd = app.add_subcommand("preset", "execute a named scenario preset");
    preset_cmd->add_option("name", preset_name, "preset name")->required();
    add_common(preset_cmd, preset_flags);
    preset_cmd->add_option("--out", preset_flags.out, "output directory")->required();
    preset_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    preset_cmd->add_option("--fast", fast, "divide horizons and intervals by this factor")->check(CLI::PositiveNumber);
    preset_cmd->add_option("--seeds", seeds, "number of seeds (runs) instead of the preset default")
        ->check(CLI::PositiveNumber);

    std::string aggregate_dir;
    auto* aggregate_cmd = app.add_subcommand("aggregate", "rebuild the report from persisted artifacts");
    aggregate_cmd->add_option("dir", aggregate_dir, "preset output directory")->required()->check(CLI::ExistingDirectory);

    std::string plot_kind, plot_input, plot_out;
    auto* plot_cmd = app.add_subcommand("plotdata", "emit a long-format table for plotting");
    plot_cmd->add_option("kind", plot_kind, "strength_bars | fitness_series | sigma_series")->required();
    plot_cmd->add_option("input", plot_input, "run or preset directory")->required()->check(CLI::ExistingDirectory);
    plot_cmd->add_option("--out", plot_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    // Configuration problems are usage errors; anything thrown while simulating is a run failure.
    try {
        if (*run_cmd) {
            kxsim::RunConfig config;
            if (!run_flags.config.empty()) config = kxsim::load_config(run_flags.config, config);
            for (const auto& s : run_flags.sets) kxsim::apply_override(config, s);
            if (run_cmd->count("--seed")) config.master_seed = run_flags.seed;
            config.validate();
            try {
                kxsim::write_artifact(run_flags.out, kxsim::run(config), {});
            } catch (const std::exception& e) {
                std::cerr << "run failed: " << e.what() << '\n';
                return exit_run_failure;
            }
            std::cerr << "completed " << run_flags.out << '\n';
        } else if (*preset_cmd) {
            kxsim::PresetOptions options;
            if (!preset_flags.config.empty()) options.config_path = preset_flags.config;
            options.overrides = preset_flags.sets;
            if (preset_cmd->count("--seed")) options.seed = preset_flags.seed;
            if (seeds) options.runs = seeds;
            options.fast = fast;
            options.jobs = jobs;
            const auto planned = kxsim::plan_preset(preset_name, options);
            try {
                kxsim::execute_runs(planned, preset_flags.out, jobs, &std::cerr);
            } catch (const kxsim::RunFailure& e) {
                std::cerr << "run failed: " << e.what() << "\nmanifest: " << e.manifest().string() << '\n';
                return exit_run_failure;
            }
            kxsim::write_report(preset_flags.out, kxsim::aggregate(preset_flags.out));
        } else if (*aggregate_cmd) {
            kxsim::write_report(aggregate_dir, kxsim::aggregate(aggregate_dir));
        } else if (*plot_cmd) {
            if (plot_out.empty()) {
                kxsim::emit_plot_data(plot_kind, plot_input, std::cout);
            } else {
                std::ofstream out(plot_out, std::ios::binary);
                if (!out) throw kxsim::ConfigError("cannot write " + plot_out);
                kxsim::emit_plot_data(plot_kind, plot_input, out);
            }
        }
    } catch (const kxsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_run_failure;
    }
    return 0;
}
