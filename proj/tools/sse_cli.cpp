// Experiment runner: every verb consumes one INI config plus optional
// overrides and writes deterministic CSV/JSON artifacts.  Exit codes:
// 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "sse/config.hpp"
#include "sse/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string mode_text;
    std::string seed_text;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file (INI)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory; overrides [output] dir");
    cmd->add_option("--seed-override", args.seed_text,
                    "replace the [seeds] noise value with this u64");
    cmd->add_option("--mode", args.mode_text,
                    "estimator mode override: exact | gauss:<eps> | shadowvar:<Ns> | "
                    "sampled:<Ns>");
}

sse::ExperimentConfig load_with_overrides(const CommonArgs& args) {
    sse::ExperimentConfig cfg = sse::load_experiment_config(args.config_path);
    if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
    if (!args.mode_text.empty()) cfg.mode = sse::parse_mode(args.mode_text);
    if (!args.seed_text.empty()) {
        try {
            std::size_t pos = 0;
            cfg.seeds.noise = std::stoull(args.seed_text, &pos);
            if (pos != args.seed_text.size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw sse::ConfigError("invalid --seed-override value '" + args.seed_text + "'");
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shadow subspace expansion experiment runner"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* run = app.add_subcommand("run", "single pipeline run (JSON + CSV artifacts)");
    CLI::App* sweep_k = app.add_subcommand("sweep-k", "subspace-size sweep with shared ranking");
    CLI::App* sweep_noise =
        app.add_subcommand("sweep-noise", "estimator noise-level sweep with fresh seeds");
    CLI::App* gate_noise =
        app.add_subcommand("gate-noise", "depolarizing fault-rate sweep on the init circuit");
    CLI::App* spectrum = app.add_subcommand("spectrum", "overlap-matrix eigenvalue report");
    CLI::App* filter_report =
        app.add_subcommand("filter-report", "candidate ranking from the local filter");
    for (CLI::App* cmd : {run, sweep_k, sweep_noise, gate_noise, spectrum, filter_report})
        add_common(cmd, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help and friends exit cleanly
    }

    try {
        const sse::ExperimentConfig cfg = load_with_overrides(args);
        const std::string stem =
            (cfg.output.dir / cfg.output.prefix).string();
        if (run->parsed()) {
            sse::RunOutput out = sse::cmd_run(cfg);
            std::printf("E_reported=%s E_direct=%s K=%d K_tilde=%d\n",
                        sse::fmt17(out.run.result.E_reported).c_str(),
                        sse::fmt17(out.run.result.E_direct).c_str(),
                        static_cast<int>(out.run.matrices.basis.size()),
                        out.run.result.K_tilde);
            std::printf("wrote %s\n", out.result_path.string().c_str());
        } else if (sweep_k->parsed()) {
            sse::cmd_sweep_k(cfg);
            std::printf("wrote %s_sweep_k.csv\n", stem.c_str());
        } else if (sweep_noise->parsed()) {
            sse::cmd_sweep_noise(cfg);
            std::printf("wrote %s_sweep_noise.csv\n", stem.c_str());
        } else if (gate_noise->parsed()) {
            sse::cmd_gate_noise(cfg);
            std::printf("wrote %s_gate_noise.csv\n", stem.c_str());
        } else if (spectrum->parsed()) {
            sse::cmd_spectrum(cfg);
            std::printf("wrote %s_spectrum.csv\n", stem.c_str());
        } else if (filter_report->parsed()) {
            sse::cmd_filter_report(cfg);
            std::printf("wrote %s_filter.csv\n", stem.c_str());
        }
    } catch (const sse::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const sse::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
