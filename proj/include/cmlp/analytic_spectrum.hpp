#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "cmlp/network.hpp"
#include "cmlp/spectrum.hpp"

namespace cmlp {

// amplitude * exp(-(k_r / width)^2), even in k_r.
struct GaussianEnvelope {
    double amplitude = 0.0;
    double width = 0.0;  // 1/e half-width in cycles per unit
};

// Mass concentrated at radial frequency +-location along the line.
struct DeltaPair {
    double location = 0.0;
    double mass = 0.0;
};

// Numerical form of a shallow neuron's Fourier transform: a distribution
// supported on the line spanned by the neuron's input weight vector, with a
// 1D envelope along it.
struct LineSpectrum {
    std::vector<double> direction;  // unit vector in R^n
    std::variant<GaussianEnvelope, DeltaPair> envelope;

    bool is_delta() const { return std::holds_alternative<DeltaPair>(envelope); }
    // Pointwise envelope value; 0 for a delta pair away from its support.
    double envelope_at(double k_r) const;
    // Envelope integrated onto a 1D grid of radial bins with the given
    // width: pointwise values for Gaussian envelopes, mass/bin_width placed
    // in the containing bin for delta pairs.
    std::vector<double> sample(const std::vector<double>& k_centers, double bin_width) const;
    // The +-location frequency vectors of a delta pair.
    std::vector<std::vector<double>> delta_points() const;
};

// Closed-form spectrum of one Gaussian neuron w2 * exp(-(w1.x)^2 / 2 sigma^2):
// direction w1/|w1|, envelope(k_r) = w2 (2 pi)^((n+1)/2) sigma/|w1| *
// exp(-(sqrt(2) pi sigma k_r / |w1|)^2). Throws on |w1| = 0.
LineSpectrum gaussian_line_spectrum(const std::vector<double>& w1, double w2, double sigma);

// Closed-form spectrum of one sinusoid neuron w2 * sin(2 pi a (w1.x)):
// delta pair at the frequency vectors +-a*w1 (radial location a|w1|) with
// mass w2 (2 pi)^(n/2) / (2 |w1|).
LineSpectrum sine_line_spectrum(const std::vector<double>& w1, double w2, double a);

// One line spectrum per hidden neuron, in neuron order. ReLU without an
// embedding has no closed form; rff_lattice covers embedded ReLU networks.
std::vector<LineSpectrum> shallow_spectrum(const ShallowView& view);

// Frequencies reachable by a polynomial approximation (of degree m-2) of a
// shallow embedded-ReLU network: every integer combination sum_j c_j l_j
// with sum_j |c_j| <= m-2. Points are stored in cycles per unit coordinate
// (the generators divided by 2 pi).
struct FrequencyLattice {
    std::vector<std::vector<double>> points;   // cycles per unit
    Matrix generators;                         // columns l_j as given
    std::size_t max_degree = 0;                // m - 2
};

// Requires m >= 5 (validity of the expansion) and the desk caps D <= 4,
// m <= 8; throws std::invalid_argument otherwise.
FrequencyLattice rff_lattice(const RffEmbedding& emb, std::size_t m);

// Both sides of the discrete derivative/spectrum inequality for a 1D signal:
// lhs = max |f'| (derivative of the trigonometric interpolant at the sample
// points), rhs = 2 pi sum_k |k| |F_k| / sqrt(N). Guarantees lhs <= rhs up to
// roundoff. Requires at least 16 samples.
struct DerivativeBound {
    double lhs = 0.0;
    double rhs = 0.0;
};

DerivativeBound derivative_spectrum_bound(const SpectrumGrid& spec,
                                          const std::vector<double>& samples);

// Empirical check of the line-concentration theorem for one shallow network:
// correlation of the projected DFT against each analytic envelope plus the
// off-line energy fraction. The DFT is mean-subtracted and Hann-windowed to
// keep domain truncation out of the comparison.
struct LineConcentrationReport {
    std::vector<double> correlations;  // per neuron
    double off_line_fraction = 0.0;
};

LineConcentrationReport verify_line_concentration(const Network& net,
                                                  std::size_t resolution,
                                                  double cone_half_angle_deg);

// Fraction of non-DC spectral energy within `tol_bins` (Chebyshev, in bin
// units) of some lattice point.
double lattice_energy_fraction(const SpectrumGrid& spec, const FrequencyLattice& lattice,
                               double tol_bins);

}  // namespace cmlp
