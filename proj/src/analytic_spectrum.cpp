#include "cmlp/analytic_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmlp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
}  // namespace

double LineSpectrum::envelope_at(double k_r) const {
    if (const auto* g = std::get_if<GaussianEnvelope>(&envelope)) {
        const double t = k_r / g->width;
        return g->amplitude * std::exp(-t * t);
    }
    return 0.0;
}

std::vector<double> LineSpectrum::sample(const std::vector<double>& k_centers,
                                         double bin_width) const {
    std::vector<double> out(k_centers.size(), 0.0);
    if (const auto* g = std::get_if<GaussianEnvelope>(&envelope)) {
        for (std::size_t i = 0; i < k_centers.size(); ++i) out[i] = envelope_at(k_centers[i]);
        (void)g;
    } else {
        const auto& d = std::get<DeltaPair>(envelope);
        for (double loc : {d.location, -d.location}) {
            std::size_t best = 0;
            double best_dist = std::abs(k_centers[0] - loc);
            for (std::size_t i = 1; i < k_centers.size(); ++i) {
                const double dist = std::abs(k_centers[i] - loc);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = i;
                }
            }
            if (best_dist <= 0.5 * bin_width) out[best] += d.mass / bin_width;
        }
    }
    return out;
}

std::vector<std::vector<double>> LineSpectrum::delta_points() const {
    const auto& d = std::get<DeltaPair>(envelope);
    std::vector<double> plus(direction.size()), minus(direction.size());
    for (std::size_t i = 0; i < direction.size(); ++i) {
        plus[i] = d.location * direction[i];
        minus[i] = -d.location * direction[i];
    }
    return {plus, minus};
}

LineSpectrum gaussian_line_spectrum(const std::vector<double>& w1, double w2, double sigma) {
    const double wn = vec_norm(w1);
    if (!(wn > 0.0))
        throw std::invalid_argument("gaussian_line_spectrum: degenerate neuron (|w1| = 0)");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_line_spectrum: sigma must be > 0");
    const auto n = static_cast<double>(w1.size());
    LineSpectrum ls;
    ls.direction.resize(w1.size());
    for (std::size_t i = 0; i < w1.size(); ++i) ls.direction[i] = w1[i] / wn;
    GaussianEnvelope env;
    env.amplitude = w2 * std::pow(kTwoPi, (n + 1.0) / 2.0) * sigma / wn;
    env.width = wn / (std::sqrt(2.0) * kPi * sigma);
    ls.envelope = env;
    return ls;
}

LineSpectrum sine_line_spectrum(const std::vector<double>& w1, double w2, double a) {
    const double wn = vec_norm(w1);
    if (!(wn > 0.0))
        throw std::invalid_argument("sine_line_spectrum: degenerate neuron (|w1| = 0)");
    if (!(a > 0.0)) throw std::invalid_argument("sine_line_spectrum: a must be > 0");
    const auto n = static_cast<double>(w1.size());
    LineSpectrum ls;
    ls.direction.resize(w1.size());
    for (std::size_t i = 0; i < w1.size(); ++i) ls.direction[i] = w1[i] / wn;
    DeltaPair d;
    d.location = a * wn;
    d.mass = w2 * std::pow(kTwoPi, n / 2.0) / (2.0 * wn);
    ls.envelope = d;
    return ls;
}

std::vector<LineSpectrum> shallow_spectrum(const ShallowView& view) {
    std::vector<LineSpectrum> out;
    out.reserve(view.neurons);
    for (std::size_t i = 0; i < view.neurons; ++i) {
        std::vector<double> w1(view.input_dim);
        for (std::size_t j = 0; j < view.input_dim; ++j) w1[j] = view.w1(i, j);
        switch (view.act.tag) {
            case ActivationKind::Tag::Gaussian:
                out.push_back(gaussian_line_spectrum(w1, view.w2[i], view.act.param));
                break;
            case ActivationKind::Tag::Sine:
                out.push_back(sine_line_spectrum(w1, view.w2[i], view.act.param));
                break;
            case ActivationKind::Tag::Relu:
                throw std::invalid_argument(
                    "shallow_spectrum: ReLU has no closed-form line spectrum; "
                    "use rff_lattice for embedded ReLU networks");
        }
    }
    return out;
}

FrequencyLattice rff_lattice(const RffEmbedding& emb, std::size_t m) {
    if (emb.D < 1) throw std::invalid_argument("rff_lattice: D must be >= 1");
    if (m < 5) throw std::invalid_argument("rff_lattice: expansion requires m >= 5");
    if (emb.D > 4 || m > 8)
        throw std::invalid_argument("rff_lattice: capped at D <= 4, m <= 8");

    const std::size_t D = emb.D;
    const auto degree = static_cast<int>(m - 2);
    const std::size_t n = emb.L.rows();

    FrequencyLattice lat;
    lat.generators = emb.L;
    lat.max_degree = m - 2;

    // Reachable coefficient vectors are exactly the integer c with
    // sum_j |c_j| <= m-2: each |c_j| needs degree |c_j| in the group's two
    // slots, and conversely the coefficient magnitudes are bounded by the
    // slot degrees. The brute-force enumeration over (k_t, a_t) in the test
    // suite pins this equivalence down.
    std::vector<int> c(D, 0);
    std::vector<std::vector<double>> points;
    auto emit = [&]() {
        std::vector<double> p(n, 0.0);
        for (std::size_t j = 0; j < D; ++j)
            for (std::size_t i = 0; i < n; ++i)
                p[i] += static_cast<double>(c[j]) * emb.L(i, j) / kTwoPi;
        points.push_back(std::move(p));
    };
    // Depth-first over coefficients with remaining total-degree budget.
    auto rec = [&](auto&& self, std::size_t j, int budget) -> void {
        if (j == D) {
            emit();
            return;
        }
        for (int cj = -budget; cj <= budget; ++cj) {
            c[j] = cj;
            self(self, j + 1, budget - std::abs(cj));
        }
        c[j] = 0;
    };
    rec(rec, 0, degree);
    lat.points = std::move(points);
    return lat;
}

DerivativeBound derivative_spectrum_bound(const SpectrumGrid& spec,
                                          const std::vector<double>& samples) {
    if (spec.dims != 1)
        throw std::invalid_argument("derivative_spectrum_bound: 1D spectra only");
    const std::size_t n = samples.size();
    if (n < 16)
        throw std::invalid_argument("derivative_spectrum_bound: need at least 16 samples");
    if (spec.resolution != n)
        throw std::invalid_argument("derivative_spectrum_bound: spectrum/sample size mismatch");

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    double rhs = 0.0;
    for (std::size_t q = 0; q < n; ++q)
        rhs += std::abs(spec.freq(q)) * spec.magnitudes[q];
    rhs *= kTwoPi / sqrt_n;

    // Derivative of the trigonometric interpolant, evaluated at the samples.
    auto coeff = dft_complex(samples);
    for (std::size_t q = 0; q < n; ++q)
        coeff[q] *= std::complex<double>(0.0, kTwoPi * spec.freq(q));
    const auto deriv = unitary_dft(coeff, true);
    double lhs = 0.0;
    for (const auto& v : deriv) lhs = std::max(lhs, std::abs(v.real()));

    return {lhs, rhs};
}

LineConcentrationReport verify_line_concentration(const Network& net,
                                                  std::size_t resolution,
                                                  double cone_half_angle_deg) {
    const ShallowView view = shallow_of(net);
    const auto spectra = shallow_spectrum(view);
    const SpectrumGrid spec = dft(mean_subtracted(sample_grid(net, resolution)), /*hann=*/true);

    LineConcentrationReport rep;
    std::vector<std::vector<double>> dirs;
    for (const auto& ls : spectra) {
        const RadialProfile prof = project_onto_line(spec, ls.direction, cone_half_angle_deg);
        std::vector<double> emp, ana;
        for (std::size_t b = 0; b < prof.radius.size(); ++b) {
            if (!prof.magnitude[b]) continue;
            emp.push_back(*prof.magnitude[b]);
            ana.push_back(std::abs(ls.envelope_at(prof.arg_radius[b])));
        }
        rep.correlations.push_back(pearson(emp, ana));
        dirs.push_back(ls.direction);
    }
    rep.off_line_fraction = off_line_energy(spec, dirs, cone_half_angle_deg);
    return rep;
}

double lattice_energy_fraction(const SpectrumGrid& spec, const FrequencyLattice& lattice,
                               double tol_bins) {
    if (spec.dims != 2)
        throw std::invalid_argument("lattice_energy_fraction: 2D spectra only");
    const double tol = tol_bins * spec.bin_width();
    double in = 0.0, total = 0.0;
    for (std::size_t i = 1; i < spec.magnitudes.size(); ++i) {
        const double fx = spec.freq(i % spec.resolution);
        const double fy = spec.freq(i / spec.resolution);
        const double e = spec.magnitudes[i] * spec.magnitudes[i];
        total += e;
        for (const auto& p : lattice.points) {
            if (std::abs(fx - p[0]) <= tol && std::abs(fy - p[1]) <= tol) {
                in += e;
                break;
            }
        }
    }
    return total > 0.0 ? in / total : 0.0;
}

}  // namespace cmlp
