#include "cmlp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmlp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }
}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

std::vector<std::complex<double>> unitary_dft(const std::vector<std::complex<double>>& in,
                                              bool inverse) {
    const std::size_t n = in.size();
    std::vector<std::complex<double>> out;
    if (is_pow2(n)) {
        out = in;
        fft(out, inverse);
        // fft() folds 1/n into the inverse; undo to a symmetric 1/sqrt(n).
        const double scale = inverse ? std::sqrt(static_cast<double>(n))
                                     : 1.0 / std::sqrt(static_cast<double>(n));
        for (auto& x : out) x *= scale;
    } else {
        out.assign(n, {0.0, 0.0});
        const double sign = inverse ? 1.0 : -1.0;
        for (std::size_t q = 0; q < n; ++q) {
            std::complex<double> s(0.0, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double ang =
                    sign * kTwoPi * static_cast<double>(j * q % n) / static_cast<double>(n);
                s += in[j] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            out[q] = s;
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (auto& x : out) x *= scale;
    }
    return out;
}

namespace {

std::vector<std::complex<double>> transform_1d(const std::vector<std::complex<double>>& in) {
    return unitary_dft(in, false);
}

}  // namespace

std::vector<std::complex<double>> dft_complex(const std::vector<double>& samples) {
    std::vector<std::complex<double>> in(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) in[i] = samples[i];
    return transform_1d(in);
}

SampledGrid sample_grid(const Network& net, std::size_t resolution) {
    if (net.input_dim > 2)
        throw std::invalid_argument("sample_grid: only 1D and 2D inputs are supported");
    if (net.output_dim != 1)
        throw std::invalid_argument("sample_grid: network output must be scalar");
    if (resolution < 16)
        throw std::invalid_argument("sample_grid: resolution must be >= 16");

    SampledGrid g;
    g.dims = net.input_dim;
    g.resolution = resolution;
    const double step = 2.0 / static_cast<double>(resolution);
    if (net.input_dim == 1) {
        Matrix X(1, resolution);
        for (std::size_t i = 0; i < resolution; ++i) X(0, i) = -1.0 + step * static_cast<double>(i);
        const Matrix out = forward_batch(net, X);
        g.values.assign(out.data().begin(), out.data().end());
    } else {
        g.values.resize(resolution * resolution);
        // Evaluate one row of the grid at a time to bound the batch size.
        Matrix X(2, resolution);
        for (std::size_t iy = 0; iy < resolution; ++iy) {
            const double y = -1.0 + step * static_cast<double>(iy);
            for (std::size_t ix = 0; ix < resolution; ++ix) {
                X(0, ix) = -1.0 + step * static_cast<double>(ix);
                X(1, ix) = y;
            }
            const Matrix out = forward_batch(net, X);
            for (std::size_t ix = 0; ix < resolution; ++ix)
                g.values[iy * resolution + ix] = out(0, ix);
        }
    }
    return g;
}

SampledGrid mean_subtracted(const SampledGrid& grid) {
    SampledGrid g = grid;
    double mean = 0.0;
    for (double v : g.values) mean += v;
    mean /= static_cast<double>(g.values.size());
    for (double& v : g.values) v -= mean;
    return g;
}

SpectrumGrid dft(const SampledGrid& grid, bool hann) {
    const std::size_t n = grid.resolution;
    if (grid.dims != 1 && grid.dims != 2)
        throw std::invalid_argument("dft: dims must be 1 or 2");

    std::vector<double> samples = grid.values;
    if (hann) {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
        if (grid.dims == 1) {
            for (std::size_t i = 0; i < n; ++i) samples[i] *= w[i];
        } else {
            for (std::size_t iy = 0; iy < n; ++iy)
                for (std::size_t ix = 0; ix < n; ++ix) samples[iy * n + ix] *= w[iy] * w[ix];
        }
    }

    SpectrumGrid spec;
    spec.dims = grid.dims;
    spec.resolution = n;
    if (grid.dims == 1) {
        if (samples.size() != n) throw std::invalid_argument("dft: bad sample count");
        const auto out = dft_complex(samples);
        spec.magnitudes.resize(n);
        for (std::size_t i = 0; i < n; ++i) spec.magnitudes[i] = std::abs(out[i]);
    } else {
        if (samples.size() != n * n) throw std::invalid_argument("dft: bad sample count");
        std::vector<std::complex<double>> buf(n * n);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = samples[i];
        std::vector<std::complex<double>> line(n);
        for (std::size_t iy = 0; iy < n; ++iy) {
            for (std::size_t ix = 0; ix < n; ++ix) line[ix] = buf[iy * n + ix];
            line = transform_1d(line);
            for (std::size_t ix = 0; ix < n; ++ix) buf[iy * n + ix] = line[ix];
        }
        for (std::size_t ix = 0; ix < n; ++ix) {
            for (std::size_t iy = 0; iy < n; ++iy) line[iy] = buf[iy * n + ix];
            line = transform_1d(line);
            for (std::size_t iy = 0; iy < n; ++iy) buf[iy * n + ix] = line[iy];
        }
        spec.magnitudes.resize(n * n);
        for (std::size_t i = 0; i < buf.size(); ++i) spec.magnitudes[i] = std::abs(buf[i]);
    }
    spec.dc = spec.magnitudes[0];
    return spec;
}

double SpectrumGrid::radial_freq(std::size_t flat) const {
    if (dims == 1) return std::abs(freq(flat));
    const double fx = freq(flat % resolution);
    const double fy = freq(flat / resolution);
    return std::hypot(fx, fy);
}

double SpectrumGrid::total_energy(bool exclude_dc) const {
    double e = 0.0;
    for (std::size_t i = exclude_dc ? 1 : 0; i < magnitudes.size(); ++i)
        e += magnitudes[i] * magnitudes[i];
    return e;
}

EnergySummary energy_summary(const SpectrumGrid& spec, double k_c) {
    if (!(k_c > 0.0) || !(k_c < spec.nyquist()))
        throw std::invalid_argument("energy_summary: cutoff must be in (0, Nyquist)");
    double low = 0.0, high = 0.0;
    for (std::size_t i = 1; i < spec.magnitudes.size(); ++i) {
        const double e = spec.magnitudes[i] * spec.magnitudes[i];
        if (spec.radial_freq(i) < k_c)
            low += e;
        else
            high += e;
    }
    EnergySummary s;
    s.cutoff = k_c;
    s.total_energy = low + high;
    if (s.total_energy > 0.0) {
        s.low_fraction = low / s.total_energy;
        s.high_fraction = high / s.total_energy;
    } else {
        s.low_fraction = 1.0;
        s.high_fraction = 0.0;
    }
    return s;
}

namespace {

double perp_distance(double fx, double fy, double ux, double uy) {
    return std::abs(fx * uy - fy * ux);
}

}  // namespace

RadialProfile project_onto_line(const SpectrumGrid& spec,
                                const std::vector<double>& direction,
                                double cone_half_angle_deg) {
    if (spec.dims != 2) throw std::invalid_argument("project_onto_line: 2D spectra only");
    if (direction.size() != 2) throw std::invalid_argument("project_onto_line: 2D direction");
    const double un = std::hypot(direction[0], direction[1]);
    if (!(un > 0.0)) throw std::invalid_argument("project_onto_line: zero direction");
    const double ux = direction[0] / un, uy = direction[1] / un;
    const double sin_half = std::sin(cone_half_angle_deg * std::numbers::pi / 180.0);

    const std::size_t n_bins = static_cast<std::size_t>(std::ceil(spec.nyquist()));
    RadialProfile prof;
    prof.radius.resize(n_bins);
    prof.magnitude.assign(n_bins, std::nullopt);
    prof.arg_radius.assign(n_bins, 0.0);
    for (std::size_t b = 0; b < n_bins; ++b) prof.radius[b] = static_cast<double>(b) + 0.5;

    for (std::size_t i = 1; i < spec.magnitudes.size(); ++i) {
        const double fx = spec.freq(i % spec.resolution);
        const double fy = spec.freq(i / spec.resolution);
        const double r = std::hypot(fx, fy);
        const auto b = static_cast<std::size_t>(r);
        if (b >= n_bins) continue;
        const double band = std::max(r * sin_half, 2.0 * spec.bin_width());
        if (perp_distance(fx, fy, ux, uy) > band) continue;
        const double m = spec.magnitudes[i];
        if (!prof.magnitude[b] || m > *prof.magnitude[b]) {
            prof.magnitude[b] = m;
            prof.arg_radius[b] = r;
        }
    }
    return prof;
}

double off_line_energy(const SpectrumGrid& spec,
                       const std::vector<std::vector<double>>& directions,
                       double cone_half_angle_deg) {
    if (spec.dims != 2) throw std::invalid_argument("off_line_energy: 2D spectra only");
    const double sin_half = std::sin(cone_half_angle_deg * std::numbers::pi / 180.0);
    std::vector<std::pair<double, double>> units;
    for (const auto& d : directions) {
        if (d.size() != 2) throw std::invalid_argument("off_line_energy: 2D directions");
        const double n = std::hypot(d[0], d[1]);
        if (!(n > 0.0)) throw std::invalid_argument("off_line_energy: zero direction");
        units.emplace_back(d[0] / n, d[1] / n);
    }
    double off = 0.0, total = 0.0;
    for (std::size_t i = 1; i < spec.magnitudes.size(); ++i) {
        const double fx = spec.freq(i % spec.resolution);
        const double fy = spec.freq(i / spec.resolution);
        const double r = std::hypot(fx, fy);
        const double e = spec.magnitudes[i] * spec.magnitudes[i];
        total += e;
        const double band = std::max(r * sin_half, 2.0 * spec.bin_width());
        bool on = false;
        for (const auto& [ux, uy] : units) {
            if (perp_distance(fx, fy, ux, uy) <= band) {
                on = true;
                break;
            }
        }
        if (!on) off += e;
    }
    return total > 0.0 ? off / total : 0.0;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("pearson: length mismatch");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace cmlp
