#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cmlp/matrix.hpp"
#include "cmlp/random.hpp"

namespace cmlp {

// A scalar signal on a regular grid: a 1D wave (ny = 1) or a 2D image.
struct GridSignal {
    std::size_t dims = 1;
    std::size_t nx = 0;
    std::size_t ny = 1;
    std::vector<double> values;  // row-major, y outer

    std::size_t count() const { return nx * ny; }
};

GridSignal wave_signal(std::vector<double> samples);

// Coordinates in [-1,1]^n with targets, a train mask over the full grid and
// left/right region labels. The full grid doubles as the test set.
struct SignalDataset {
    std::size_t input_dim = 1;
    Matrix coords;                         // n x N
    std::vector<double> targets;           // N
    std::vector<std::uint8_t> train_mask;  // N
    std::vector<std::uint8_t> region;      // 0 = left, 1 = right
    std::size_t nx = 0, ny = 1;

    std::size_t count() const { return targets.size(); }
    std::size_t train_count() const;
    std::vector<std::size_t> train_indices() const;
};

// Left half fully sampled, right half subsampled at `sparse_rate` without
// replacement; the test set is the full grid. Requires a 2D signal at least
// 2 columns wide and sparse_rate in (0, 1].
SignalDataset make_uneven_image_dataset(const GridSignal& image, double sparse_rate,
                                        RandomSource& rng);

// Uniform subsample at `rate` (exclusive (0,1)) for training, full grid for
// testing. Throws when fewer than 8 train points result. `region_split` is
// the fraction of the x-range carrying the "left" label.
SignalDataset make_sparse_dataset(const GridSignal& signal, double rate, RandomSource& rng,
                                  double region_split = 0.5);

// 1D signal whose left region sums the `low_freqs` sinusoids and right
// region the `high_freqs` ones (cycles per unit coordinate), normalized to
// [-1, 1]. Frequencies must stay below the grid Nyquist.
GridSignal synth_multiband_wave(std::size_t n_samples, const std::vector<double>& low_freqs,
                                const std::vector<double>& high_freqs, double region_split);

// Snapshot as CSV rows of (coords..., target, train flag, region label).
void save_dataset_csv(const SignalDataset& ds, const std::string& path);

}  // namespace cmlp
