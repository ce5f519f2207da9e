#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"

namespace {

using cmlp::exp::ExperimentReport;
using cmlp::exp::RunContext;

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::map<std::string, std::string> overrides;
};

void add_override_flag(CLI::App* cmd, CommonFlags& flags, const std::string& key) {
    cmd->add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags.overrides[key] = v; });
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (key=value with sections)");
    cmd->add_option("--out", flags.out, "Output directory");
    cmd->add_option("--seed", flags.seed, "Base seed")->each([&flags](const std::string&) {
        flags.seed_set = true;
    });
    // Every training field is also a flag; flags win over the config file.
    for (const char* key :
         {"arch", "depth", "width", "sigma", "a", "eps", "rate", "steps", "lr", "batch_size",
          "optimizer", "xi", "n_pairs", "samples", "size", "image", "images", "wav",
          "low_freqs", "high_freqs", "family", "sigma_down", "sigma_up", "depth_sweep",
          "hyper_sweep", "depth_hyper", "hyper_depth", "n_images", "resolution",
          "sigma_sweep", "split", "a_down", "a_up", "eps_gaussian", "eps_sine", "eps_rff"})
        add_override_flag(cmd, flags, key);
}

RunContext make_context(const std::string& section, const CommonFlags& flags) {
    RunContext ctx;
    ctx.section = section;
    if (!flags.config_path.empty()) ctx.config = cmlp::exp::Config::from_file(flags.config_path);
    for (const auto& [k, v] : flags.overrides) ctx.config.set(section, k, v);
    ctx.seed = flags.seed_set ? flags.seed : ctx.config.get_u64(section, "seed", 1);
    ctx.config.set(section, "seed", std::to_string(ctx.seed));
    ctx.out_dir =
        !flags.out.empty() ? flags.out : ctx.config.get(section, "out", "out/" + section);
    return ctx;
}

void print_report(const std::string& name, const ExperimentReport& report) {
    for (const auto& c : report.checks)
        std::printf("[%s] %s: %s (%.6g vs %.6g)\n", name.c_str(), c.name.c_str(),
                    c.passed ? "pass" : "FAIL", c.lhs, c.rhs);
    std::printf("[%s] done\n", name.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coordinate network spectra and smoothness regularization experiments"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        ExperimentReport (*fn)(const RunContext&);
    };
    const std::vector<Command> commands = {
        {"toy-spectrum", "Two-neuron analytic spectra against the grid DFT",
         cmlp::exp::run_toy_spectrum},
        {"wave", "Two-region wave reconstruction across bandwidth settings",
         cmlp::exp::run_wave},
        {"image-uneven", "Unevenly sampled image across architectures",
         cmlp::exp::run_image_uneven},
        {"image-sparse", "Sparsely sampled image corpus with and without regularization",
         cmlp::exp::run_image_sparse},
        {"spectrum-depth", "Trained-network spectra across depth and hyperparameters",
         cmlp::exp::run_spectrum_depth},
        {"derivative-maps", "Gradient-magnitude maps across bandwidth settings",
         cmlp::exp::run_derivative_maps},
    };

    std::vector<std::unique_ptr<CommonFlags>> flag_sets;
    for (const auto& c : commands) {
        auto flags = std::make_unique<CommonFlags>();
        CLI::App* cmd = app.add_subcommand(c.name, c.help);
        add_common(cmd, *flags);
        CommonFlags* fp = flags.get();
        const auto fn = c.fn;
        const std::string name = c.name;
        cmd->callback([fp, fn, name]() {
            const RunContext ctx = make_context(name, *fp);
            print_report(name, fn(ctx));
        });
        flag_sets.push_back(std::move(flags));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
