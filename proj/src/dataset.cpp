#include "cmlp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace cmlp {

GridSignal wave_signal(std::vector<double> samples) {
    GridSignal g;
    g.dims = 1;
    g.nx = samples.size();
    g.ny = 1;
    g.values = std::move(samples);
    return g;
}

std::size_t SignalDataset::train_count() const {
    std::size_t c = 0;
    for (auto m : train_mask) c += m ? 1 : 0;
    return c;
}

std::vector<std::size_t> SignalDataset::train_indices() const {
    std::vector<std::size_t> idx;
    idx.reserve(count());
    for (std::size_t i = 0; i < train_mask.size(); ++i)
        if (train_mask[i]) idx.push_back(i);
    return idx;
}

namespace {

SignalDataset grid_base(const GridSignal& sig) {
    SignalDataset ds;
    ds.input_dim = sig.dims;
    ds.nx = sig.nx;
    ds.ny = sig.ny;
    const std::size_t n = sig.count();
    ds.coords = Matrix(sig.dims, n);
    ds.targets = sig.values;
    ds.train_mask.assign(n, 0);
    ds.region.assign(n, 0);
    for (std::size_t iy = 0; iy < sig.ny; ++iy) {
        for (std::size_t ix = 0; ix < sig.nx; ++ix) {
            const std::size_t i = iy * sig.nx + ix;
            ds.coords(0, i) = -1.0 + 2.0 * static_cast<double>(ix) / static_cast<double>(sig.nx);
            if (sig.dims == 2)
                ds.coords(1, i) =
                    -1.0 + 2.0 * static_cast<double>(iy) / static_cast<double>(sig.ny);
        }
    }
    return ds;
}

// Choose k of the pool uniformly without replacement (partial Fisher-Yates).
std::vector<std::size_t> choose_without_replacement(std::vector<std::size_t> pool,
                                                    std::size_t k, RandomSource& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace

SignalDataset make_uneven_image_dataset(const GridSignal& image, double sparse_rate,
                                        RandomSource& rng) {
    if (image.dims != 2) throw std::invalid_argument("make_uneven_image_dataset: need a 2D signal");
    if (image.nx < 2)
        throw std::invalid_argument("make_uneven_image_dataset: image narrower than 2 columns");
    if (!(sparse_rate > 0.0 && sparse_rate <= 1.0))
        throw std::invalid_argument("make_uneven_image_dataset: sparse_rate must be in (0, 1]");

    SignalDataset ds = grid_base(image);
    const std::size_t half = image.nx / 2;
    std::vector<std::size_t> right_pool;
    for (std::size_t iy = 0; iy < image.ny; ++iy) {
        for (std::size_t ix = 0; ix < image.nx; ++ix) {
            const std::size_t i = iy * image.nx + ix;
            if (ix < half) {
                ds.train_mask[i] = 1;
                ds.region[i] = 0;
            } else {
                ds.region[i] = 1;
                right_pool.push_back(i);
            }
        }
    }
    const auto k = static_cast<std::size_t>(
        std::llround(sparse_rate * static_cast<double>(right_pool.size())));
    for (std::size_t i : choose_without_replacement(std::move(right_pool), k, rng))
        ds.train_mask[i] = 1;
    return ds;
}

SignalDataset make_sparse_dataset(const GridSignal& signal, double rate, RandomSource& rng,
                                  double region_split) {
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("make_sparse_dataset: rate must be in (0, 1)");
    if (!(region_split > 0.0 && region_split < 1.0))
        throw std::invalid_argument("make_sparse_dataset: region_split must be in (0, 1)");

    SignalDataset ds = grid_base(signal);
    const std::size_t n = ds.count();
    const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    if (k < 8) throw std::invalid_argument("make_sparse_dataset: too sparse (< 8 train points)");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i : choose_without_replacement(std::move(pool), k, rng))
        ds.train_mask[i] = 1;
    const auto split_col = static_cast<std::size_t>(
        std::llround(region_split * static_cast<double>(signal.nx)));
    for (std::size_t iy = 0; iy < signal.ny; ++iy)
        for (std::size_t ix = 0; ix < signal.nx; ++ix)
            ds.region[iy * signal.nx + ix] = ix < split_col ? 0 : 1;
    return ds;
}

GridSignal synth_multiband_wave(std::size_t n_samples, const std::vector<double>& low_freqs,
                                const std::vector<double>& high_freqs, double region_split) {
    if (low_freqs.empty() || high_freqs.empty())
        throw std::invalid_argument("synth_multiband_wave: frequency lists must be nonempty");
    if (!(region_split > 0.0 && region_split < 1.0))
        throw std::invalid_argument("synth_multiband_wave: region_split must be in (0, 1)");
    const double nyquist = static_cast<double>(n_samples) / 4.0;  // cycles/unit over [-1,1)
    for (double f : low_freqs)
        if (!(f > 0.0) || f >= nyquist)
            throw std::invalid_argument("synth_multiband_wave: frequency above grid Nyquist");
    for (double f : high_freqs)
        if (!(f > 0.0) || f >= nyquist)
            throw std::invalid_argument("synth_multiband_wave: frequency above grid Nyquist");

    std::vector<double> v(n_samples, 0.0);
    const double split_x = -1.0 + 2.0 * region_split;
    double peak = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_samples);
        const auto& freqs = x < split_x ? low_freqs : high_freqs;
        double s = 0.0;
        for (double f : freqs) s += std::sin(2.0 * std::numbers::pi * f * x);
        v[i] = s;
        peak = std::max(peak, std::abs(s));
    }
    if (peak > 0.0)
        for (double& x : v) x /= peak;
    return wave_signal(std::move(v));
}

void save_dataset_csv(const SignalDataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_dataset_csv: cannot open " + path);
    os << (ds.input_dim == 1 ? "x" : "x,y") << ",target,train,region\n";
    char buf[64];
    for (std::size_t i = 0; i < ds.count(); ++i) {
        for (std::size_t d = 0; d < ds.input_dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.coords(d, i));
            os << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", ds.targets[i]);
        os << buf << ',' << int(ds.train_mask[i]) << ',' << int(ds.region[i]) << '\n';
    }
}

}  // namespace cmlp
