#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cmlp/dataset.hpp"
#include "cmlp/network.hpp"
#include "cmlp/regularizer.hpp"

namespace cmlp {

struct TrainConfig {
    enum class Optimizer { Sgd, Adam };

    Optimizer optimizer = Optimizer::Adam;
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t steps = 2000;
    // 0 = full batch up to 4096 train points, minibatches of 1024 beyond.
    std::size_t batch_size = 0;
    std::uint64_t seed = 0;
    RegConfig reg;
    ArchSpec arch;
};

struct Metrics {
    double t_psnr = 0.0;
    double l_psnr = 0.0;
    double r_psnr = 0.0;
    double mse = 0.0;
    std::vector<double> loss_history;
};

struct TrainResult {
    Network net;
    Metrics metrics;
};

// 10*log10(1 / MSE over the subset), capped at 100 dB. Throws on an empty
// subset or length mismatch.
double psnr(const std::vector<double>& pred, const std::vector<double>& target,
            const std::vector<std::size_t>& subset);

// Runs the optimizer over shuffled minibatches of the train set;
// deterministic under cfg.seed. Metrics are computed on the full grid.
// Throws std::runtime_error naming the step if the loss turns non-finite.
TrainResult train(const SignalDataset& dataset, const TrainConfig& cfg);

// Predictions of the network at every dataset coordinate.
std::vector<double> predict(const Network& net, const SignalDataset& dataset);

// Metrics of an already-trained network on the dataset (optionally clamping
// predictions to [0,1] for intensity signals).
Metrics evaluate(const Network& net, const SignalDataset& dataset, bool clamp01);

}  // namespace cmlp
