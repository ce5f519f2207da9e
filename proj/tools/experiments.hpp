#pragma once

#include <string>
#include <vector>

#include "cmlp/dataset.hpp"
#include "cmlp/network.hpp"
#include "config.hpp"

namespace cmlp::exp {

// Resolved invocation: merged config plus output root and base seed.
struct RunContext {
    Config config;
    std::string section;   // experiment id, also the config section
    std::string out_dir;
    std::uint64_t seed = 1;

    std::string get(const std::string& key, const std::string& fallback) const {
        return config.get(section, key, fallback);
    }
    double get_double(const std::string& key, double fallback) const {
        return config.get_double(section, key, fallback);
    }
    std::size_t get_size(const std::string& key, std::size_t fallback) const {
        return config.get_size(section, key, fallback);
    }
};

// The two-neuron Gaussian toy setup used by the spectrum demonstrations.
struct ToySetup {
    static constexpr double w0[2] = {10.0, 4.0};
    static constexpr double w1[2] = {-4.0, 11.0};
    static constexpr double out0 = 1.0;
    static constexpr double out1 = 0.8;
    static constexpr double sigma_base = 0.5;
    static constexpr double cutoff = 4.0;  // low/high split, cycles per unit
};

Network toy_gaussian_network(const std::vector<double>& scale_w, double sigma);

// Deterministic natural-style test image: octave gratings with 1/f
// amplitudes plus smooth blobs, normalized to [0, 1].
GridSignal synth_image(std::uint64_t seed, std::size_t resolution);

// Per-architecture hyperparameter settings: low bandwidth, high bandwidth.
struct ArchSetting {
    std::string name;       // gaussian | sine | rff
    double k_down = 0.0;    // sigma / a / embedding sigma
    double k_up = 0.0;
};
const std::vector<ArchSetting>& arch_settings();

// Builds the standard experiment architecture for one family.
ArchSpec make_arch(const std::string& family, double hyper, std::size_t input_dim,
                   std::size_t depth, std::size_t width);

struct CheckResult {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ExperimentReport {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

ExperimentReport run_toy_spectrum(const RunContext& ctx);
ExperimentReport run_wave(const RunContext& ctx);
ExperimentReport run_image_uneven(const RunContext& ctx);
ExperimentReport run_image_sparse(const RunContext& ctx);
ExperimentReport run_spectrum_depth(const RunContext& ctx);
ExperimentReport run_derivative_maps(const RunContext& ctx);

// Writes manifest.json (command, seed, merged config) into ctx.out_dir and
// appends the produced file list.
void write_manifest(const RunContext& ctx, const std::vector<std::string>& outputs);

}  // namespace cmlp::exp
