#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "cmlp/network.hpp"

namespace cmlp {

// Scalar signal sampled on the uniform grid x_i = -1 + 2*i/N over [-1,1)^dims,
// row-major (the last axis varies fastest).
struct SampledGrid {
    std::size_t dims = 1;
    std::size_t resolution = 0;  // samples per axis
    std::vector<double> values;

    double coord(std::size_t index_on_axis) const {
        return -1.0 + 2.0 * static_cast<double>(index_on_axis) /
                          static_cast<double>(resolution);
    }
};

// Discrete magnitude spectrum under the project-wide unitary convention
// (forward kernel e^{-2*pi*i*k*x}, 1/sqrt(N) per axis). Bins are kept in
// natural DFT order; freq() maps a bin index to signed cycles per unit
// coordinate. The DC magnitude is kept in the array and mirrored in `dc`.
struct SpectrumGrid {
    std::size_t dims = 1;
    std::size_t resolution = 0;
    std::vector<double> magnitudes;
    double dc = 0.0;

    static constexpr double kDomainLength = 2.0;

    // Signed frequency of a bin index along one axis, cycles per unit.
    double freq(std::size_t bin) const {
        const auto n = static_cast<std::ptrdiff_t>(resolution);
        auto q = static_cast<std::ptrdiff_t>(bin);
        if (q > n / 2) q -= n;
        return static_cast<double>(q) / kDomainLength;
    }
    double bin_width() const { return 1.0 / kDomainLength; }
    double nyquist() const {
        return static_cast<double>(resolution) / (2.0 * kDomainLength);
    }
    // Radial frequency of a flat bin index (1D: |freq|).
    double radial_freq(std::size_t flat) const;
    double total_energy(bool exclude_dc) const;
};

// Energy split of the non-DC spectrum at a cutoff frequency.
struct EnergySummary {
    double low_fraction = 0.0;
    double high_fraction = 0.0;
    double total_energy = 0.0;  // non-DC
    double cutoff = 0.0;
};

// Values of forward() on the uniform grid over [-1,1]^n. Requires scalar
// output, input dim 1 or 2, resolution >= 16.
SampledGrid sample_grid(const Network& net, std::size_t resolution);

// DFT magnitudes; radix-2 FFT when the resolution is a power of two, direct
// transform otherwise. With `hann` the samples are multiplied by a periodic
// Hann window first (Parseval then holds for the windowed signal).
SpectrumGrid dft(const SampledGrid& grid, bool hann = false);

// Subtracts the sample mean; used before windowed DFTs so the smeared DC
// bin does not pollute low-frequency comparisons.
SampledGrid mean_subtracted(const SampledGrid& grid);

// Fractions of non-DC energy strictly below / at-or-above the cutoff
// (radial frequency in 2D). Requires 0 < k_c < Nyquist.
EnergySummary energy_summary(const SpectrumGrid& spec, double k_c);

// 1D envelope of a 2D spectrum along +-direction: per radial bin of width
// 1 cycle/unit, the max magnitude among bins within the cone (angular
// half-angle plus the nearest-bin band; the band spans two DFT bins so the
// Hann kernel's one-bin reach stays inside it). Radii with no candidate
// bins are reported as missing.
struct RadialProfile {
    std::vector<double> radius;                    // bin centers
    std::vector<std::optional<double>> magnitude;
    std::vector<double> arg_radius;                // exact radius of the max bin
};

RadialProfile project_onto_line(const SpectrumGrid& spec,
                                const std::vector<double>& direction,
                                double cone_half_angle_deg);

// Fraction of non-DC energy lying outside every cone around the given
// directions. A bin is inside a cone when its perpendicular distance to the
// line is <= max(radius * sin(half_angle), 2 * bin_width).
double off_line_energy(const SpectrumGrid& spec,
                       const std::vector<std::vector<double>>& directions,
                       double cone_half_angle_deg);

// Pearson correlation; 0 if either side is constant.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

// In-place complex FFT helpers shared with the analytic oracle side.
void fft(std::vector<std::complex<double>>& a, bool inverse);
// Unitary 1D transform of any length (FFT for powers of two, direct
// otherwise); `inverse` flips the kernel sign.
std::vector<std::complex<double>> unitary_dft(const std::vector<std::complex<double>>& in,
                                              bool inverse);
std::vector<std::complex<double>> dft_complex(const std::vector<double>& samples);

}  // namespace cmlp
