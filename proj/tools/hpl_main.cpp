// hpl: simulate heralded single-photon frames, analyze them, report.
//
//   hpl full     --config cfg --out dir [--seed N] [--frames N]
//   hpl simulate --config cfg --out dir [--seed N] [--frames N] [--csv]
//   hpl analyze  --config cfg --out dir [--in frames.hplf]
//   hpl report   --config cfg --out dir
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 1 anything else (I/O, bad usage).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "hpl/errors.hpp"
#include "hpl/experiment.hpp"

namespace {

namespace ex = hpl::experiment;

struct CommonArgs {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> frames;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool overrides) {
    cmd->add_option("--config", args.config, "Configuration file (key = value)")->required();
    cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
    if (overrides) {
        cmd->add_option("--seed", args.seed, "Override the configured seed");
        cmd->add_option("--frames", args.frames, "Override n_frames")->check(CLI::PositiveNumber);
    }
}

hpl::config::RunConfig load(const CommonArgs& args) {
    auto config = ex::apply_overrides(hpl::config::load_config(args.config), {args.seed, args.frames});
    config.experiment.validate();
    return config;
}

int run(CLI::App& app, const CommonArgs& args, const std::string& input, bool csv) {
    if (app.got_subcommand("full")) {
        std::cout << ex::run_experiment(args.config, args.out, {args.seed, args.frames});
        return 0;
    }
    const auto config = load(args);
    ex::OutputTransaction out(args.out);
    if (app.got_subcommand("simulate")) {
        const auto s = ex::simulate(config, out, csv);
        std::cout << "frames: " << s.n_frames << " (true " << s.true_heralds << ", dark " << s.dark_heralds
                  << ", stray " << s.stray_heralds << ")\n";
    } else if (app.got_subcommand("analyze")) {
        const std::filesystem::path in = input.empty() ? out.dir() / ex::files::frames : std::filesystem::path(input);
        ex::analyze(config, in, out);
        std::cout << "wrote " << (out.dir() / ex::files::report).string() << '\n';
    } else {
        std::cout << ex::report(config, out);
    }
    out.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heralded single-photon homodyne simulator and analyzer"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string input;
    bool csv = false;

    auto* full = app.add_subcommand("full", "Simulate, analyze and report in one go");
    add_common(full, args, true);
    auto* simulate = app.add_subcommand("simulate", "Synthesize homodyne frames");
    add_common(simulate, args, true);
    simulate->add_flag("--csv", csv, "Also export frames.csv");
    auto* analyze = app.add_subcommand("analyze", "PCA, tomography and bootstrap on a frame file");
    add_common(analyze, args, true);
    analyze->add_option("--in", input, "Frame file (.hplf or .csv); default <out>/frames.hplf");
    auto* report = app.add_subcommand("report", "Loss budget and analysis summary");
    add_common(report, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        return run(app, args, input, csv);
    } catch (const hpl::ConfigError& e) {
        std::cerr << "hpl: " << e.what() << '\n';
        for (const auto& key : e.keys()) std::cerr << "invalid key: " << key << '\n';
        return 2;
    } catch (const hpl::NumericalError& e) {
        std::cerr << "hpl: numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "hpl: " << e.what() << '\n';
        return 1;
    }
}
