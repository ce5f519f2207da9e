#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "cmlp/analytic_spectrum.hpp"
#include "cmlp/spectrum.hpp"
#include "helpers.hpp"

using namespace cmlp;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Network shallow_net(const std::vector<std::vector<double>>& w1, const std::vector<double>& w2,
                    const ActivationKind& act) {
    const std::size_t n = w1.front().size();
    ArchSpec spec;
    spec.input_dim = n;
    spec.hidden_widths = {w1.size()};
    spec.activation = act;
    RandomSource rng(1);
    Network net = init_network(spec, rng);
    for (std::size_t i = 0; i < w1.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) net.hidden[0].W(i, j) = w1[i][j];
        net.hidden[0].b(i, 0) = 0.0;
        net.w_out(0, i) = w2[i];
    }
    net.b_out(0, 0) = 0.0;
    return net;
}
}  // namespace

TEST_CASE("gaussian envelope peak value and direction") {
    const std::vector<double> w1{3.0, 4.0};
    const double w2 = 1.7, sigma = 0.4;
    const LineSpectrum ls = gaussian_line_spectrum(w1, w2, sigma);
    CHECK(ls.direction[0] == doctest::Approx(0.6));
    CHECK(ls.direction[1] == doctest::Approx(0.8));
    // Peak at k_r = 0 is w2 (2 pi)^((n+1)/2) sigma / |w1|.
    const double expect = w2 * std::pow(kTwoPi, 1.5) * sigma / 5.0;
    CHECK(ls.envelope_at(0.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("doubling sigma doubles the peak and halves the 1/e width") {
    const std::vector<double> w1{2.0, -1.0};
    const LineSpectrum a = gaussian_line_spectrum(w1, 1.0, 0.3);
    const LineSpectrum b = gaussian_line_spectrum(w1, 1.0, 0.6);
    const auto& ga = std::get<GaussianEnvelope>(a.envelope);
    const auto& gb = std::get<GaussianEnvelope>(b.envelope);
    CHECK(gb.amplitude == doctest::Approx(2.0 * ga.amplitude).epsilon(1e-12));
    CHECK(gb.width == doctest::Approx(0.5 * ga.width).epsilon(1e-12));
}

TEST_CASE("gaussian envelope matches the DFT of exp(-x^2/2) on a long grid") {
    // w1 = 1, sigma = 1, w2 = 1 in 1D, sampled over [-8, 8).
    const std::size_t n = 2048;
    const double half = 8.0;
    std::vector<double> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n);
        samples[i] = std::exp(-x * x / 2.0);
    }
    const auto coeff = dft_complex(samples);
    const LineSpectrum ls = gaussian_line_spectrum({1.0}, 1.0, 1.0);
    std::vector<double> emp, ana;
    for (std::size_t q = 0; q < n; ++q) {
        auto signed_q = static_cast<double>(q <= n / 2 ? q : q - n);
        const double freq = signed_q / (2.0 * half);
        if (std::abs(freq) > 2.0) continue;  // both sides vanish well before this
        emp.push_back(std::abs(coeff[q]));
        ana.push_back(ls.envelope_at(freq));
    }
    CHECK(pearson(emp, ana) > 0.999);
}

TEST_CASE("degenerate neurons are rejected") {
    CHECK_THROWS_AS((void)gaussian_line_spectrum({0.0, 0.0}, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)sine_line_spectrum({0.0}, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gaussian_line_spectrum({1.0}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sine spectrum: delta locations at +-a*w1") {
    const LineSpectrum ls = sine_line_spectrum({3.0, 4.0}, 1.0, 2.0);
    const auto pts = ls.delta_points();
    REQUIRE(pts.size() == 2);
    CHECK(pts[0][0] == doctest::Approx(6.0));
    CHECK(pts[0][1] == doctest::Approx(8.0));
    CHECK(pts[1][0] == doctest::Approx(-6.0));
    CHECK(pts[1][1] == doctest::Approx(-8.0));
    const auto& d = std::get<DeltaPair>(ls.envelope);
    CHECK(d.location == doctest::Approx(10.0));
    CHECK(d.mass == doctest::Approx(kTwoPi / 10.0).epsilon(1e-12));
}

TEST_CASE("sine spectrum: a -> 0 collapses the pair to the origin") {
    const LineSpectrum ls = sine_line_spectrum({3.0, 4.0}, 1.0, 1e-12);
    const auto& d = std::get<DeltaPair>(ls.envelope);
    CHECK(d.location < 1e-10);
}

TEST_CASE("sine DFT oracle: single neuron peaks at frequency 5") {
    const Network net = shallow_net({{5.0}}, {1.0}, ActivationKind::sine(1.0));
    const SpectrumGrid spec = dft(sample_grid(net, 512));
    std::size_t best = 1;
    for (std::size_t q = 1; q < spec.magnitudes.size(); ++q)
        if (spec.magnitudes[q] > spec.magnitudes[best]) best = q;
    CHECK(std::abs(std::abs(spec.freq(best)) - 5.0) <= 0.5);
}

TEST_CASE("shallow_spectrum: one line per neuron, order preserved, linear in w2") {
    const Network net = shallow_net({{5.0, 2.0}, {-3.0, 7.0}}, {1.0, 0.8},
                                    ActivationKind::gaussian(0.5));
    const auto spectra = shallow_spectrum(shallow_of(net));
    REQUIRE(spectra.size() == 2);
    CHECK(spectra[0].direction[0] == doctest::Approx(5.0 / std::hypot(5.0, 2.0)));

    Network scaled = net;
    for (std::size_t i = 0; i < 2; ++i) scaled.w_out(0, i) *= -2.5;
    const auto spectra2 = shallow_spectrum(shallow_of(scaled));
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::get<GaussianEnvelope>(spectra2[i].envelope).amplitude ==
              doctest::Approx(-2.5 * std::get<GaussianEnvelope>(spectra[i].envelope).amplitude));
}

TEST_CASE("shallow_spectrum rejects plain ReLU") {
    const Network net = shallow_net({{1.0, 0.0}}, {1.0}, ActivationKind::relu());
    CHECK_THROWS_AS((void)shallow_spectrum(shallow_of(net)), std::invalid_argument);
}

namespace {

// Brute-force enumeration straight from the reachable-frequency rule:
// coefficients (2a(2j-1) - k(2j-1)) + (2a(2j) - k(2j)) over all slot degrees
// k_t with sum <= degree and 0 <= a_t <= k_t.
std::set<std::vector<int>> brute_force_coeffs(std::size_t D, int degree) {
    std::set<std::vector<int>> coeffs;
    const std::size_t slots = 2 * D;
    std::vector<int> k(slots, 0), a(slots, 0);
    auto rec_a = [&](auto&& self, std::size_t t) -> void {
        if (t == slots) {
            std::vector<int> c(D, 0);
            for (std::size_t j = 0; j < D; ++j)
                c[j] = (2 * a[2 * j] - k[2 * j]) + (2 * a[2 * j + 1] - k[2 * j + 1]);
            coeffs.insert(c);
            return;
        }
        for (a[t] = 0; a[t] <= k[t]; ++a[t]) self(self, t + 1);
        a[t] = 0;
    };
    auto rec_k = [&](auto&& self, std::size_t t, int budget) -> void {
        if (t == slots) {
            rec_a(rec_a, 0);
            return;
        }
        for (k[t] = 0; k[t] <= budget; ++k[t]) self(self, t + 1, budget - k[t]);
        k[t] = 0;
    };
    rec_k(rec_k, 0, degree);
    return coeffs;
}

std::set<std::vector<long long>> rounded_points(const std::vector<std::vector<double>>& pts) {
    std::set<std::vector<long long>> out;
    for (const auto& p : pts) {
        std::vector<long long> r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) r[i] = std::llround(p[i] * 1e6);
        out.insert(r);
    }
    return out;
}

RffEmbedding embedding_from(const Matrix& L, double sigma) {
    RffEmbedding emb;
    emb.D = L.cols();
    emb.sigma_embed = sigma;
    emb.L = L;
    return emb;
}

}  // namespace

TEST_CASE("rff_lattice D=1 matches brute force and spans {-3..3} l1") {
    const auto emb = embedding_from(Matrix(1, 1, {kTwoPi * 2.0}), 1.0);
    const FrequencyLattice lat = rff_lattice(emb, 5);
    // Expected: multiples c * 2.0 cycles/unit for c in -3..3.
    std::set<long long> got;
    for (const auto& p : lat.points) got.insert(std::llround(p[0] * 1e6));
    std::set<long long> want;
    for (int c = -3; c <= 3; ++c) want.insert(std::llround(2.0 * c * 1e6));
    CHECK(got == want);

    // Brute-force oracle over (k_t, a_t).
    const auto coeffs = brute_force_coeffs(1, 3);
    std::set<long long> oracle;
    for (const auto& c : coeffs) oracle.insert(std::llround(2.0 * c[0] * 1e6));
    CHECK(got == oracle);
}

TEST_CASE("rff_lattice D=2 matches brute force") {
    Matrix L(2, 2);
    L(0, 0) = kTwoPi * 3.0;
    L(1, 0) = kTwoPi * 1.0;
    L(0, 1) = kTwoPi * -1.0;
    L(1, 1) = kTwoPi * 2.0;
    const auto emb = embedding_from(L, 1.0);
    const FrequencyLattice lat = rff_lattice(emb, 6);

    const auto coeffs = brute_force_coeffs(2, 4);
    std::vector<std::vector<double>> oracle_pts;
    for (const auto& c : coeffs)
        oracle_pts.push_back({3.0 * c[0] - 1.0 * c[1], 1.0 * c[0] + 2.0 * c[1]});
    CHECK(rounded_points(lat.points) == rounded_points(oracle_pts));
}

TEST_CASE("rff_lattice contains zero and is negation symmetric") {
    RandomSource rng(5);
    Matrix L(2, 3);
    for (std::size_t i = 0; i < L.size(); ++i) L[i] = rng.normal() * kTwoPi;
    const FrequencyLattice lat = rff_lattice(embedding_from(L, 1.0), 7);
    const auto pts = rounded_points(lat.points);
    CHECK(pts.count({0, 0}) == 1);
    for (const auto& p : lat.points) {
        std::vector<long long> neg{std::llround(-p[0] * 1e6), std::llround(-p[1] * 1e6)};
        CHECK(pts.count(neg) == 1);
    }
}

TEST_CASE("rff_lattice domain errors") {
    const auto emb = embedding_from(Matrix(1, 1, {1.0}), 1.0);
    CHECK_THROWS_AS((void)rff_lattice(emb, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)rff_lattice(emb, 9), std::invalid_argument);
    const auto wide = embedding_from(Matrix(1, 5), 1.0);
    CHECK_THROWS_AS((void)rff_lattice(wide, 5), std::invalid_argument);
}

namespace {
SampledGrid grid_1d(std::size_t n, const std::function<double(double)>& f) {
    SampledGrid g;
    g.dims = 1;
    g.resolution = n;
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = f(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n));
    return g;
}
}  // namespace

TEST_CASE("derivative bound: sin(2 pi x) attains equality at 2 pi") {
    const auto g = grid_1d(256, [](double x) { return std::sin(kTwoPi * x); });
    const auto bound = derivative_spectrum_bound(dft(g), g.values);
    CHECK(bound.lhs == doctest::Approx(kTwoPi).epsilon(1e-9));
    CHECK(bound.rhs >= bound.lhs - 1e-9);
    CHECK(bound.rhs == doctest::Approx(kTwoPi).epsilon(1e-9));
}

TEST_CASE("derivative bound: constant signal gives 0 <= 0") {
    const auto g = grid_1d(64, [](double) { return 0.8; });
    const auto bound = derivative_spectrum_bound(dft(g), g.values);
    CHECK(bound.lhs == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bound.rhs == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("derivative bound holds on random band-limited signals") {
    RandomSource rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const auto g = grid_1d(128, [&](double) { return 0.0; });
        SampledGrid sig = g;
        // 5 random modes below Nyquist.
        std::vector<double> amp(5), freq(5), phase(5);
        for (int m = 0; m < 5; ++m) {
            amp[m] = rng.uniform(-1.0, 1.0);
            freq[m] = 0.5 * static_cast<double>(1 + rng.below(50));
            phase[m] = rng.uniform(0.0, kTwoPi);
        }
        for (std::size_t i = 0; i < 128; ++i) {
            const double x = -1.0 + 2.0 * static_cast<double>(i) / 128.0;
            double v = 0.0;
            for (int m = 0; m < 5; ++m) v += amp[m] * std::sin(kTwoPi * freq[m] * x + phase[m]);
            sig.values[i] = v;
        }
        const auto bound = derivative_spectrum_bound(dft(sig), sig.values);
        CHECK(bound.lhs <= bound.rhs + 1e-6);
    }
}

TEST_CASE("derivative bound rejects coarse grids") {
    const auto g = grid_1d(16, [](double x) { return x; });
    SampledGrid small;
    small.dims = 1;
    small.resolution = 8;
    small.values.assign(8, 0.0);
    CHECK_THROWS_AS((void)derivative_spectrum_bound(dft(g), small.values),
                    std::invalid_argument);
}

TEST_CASE("sigma tradeoff: smaller sigma trades low for high frequencies") {
    const std::vector<double> w1{6.0, 2.0};
    const double k_high = 12.0;
    double prev_peak = -1.0, prev_tail = -1.0;
    bool first = true;
    for (double sigma : {0.8, 0.4, 0.2, 0.1}) {
        const LineSpectrum ls = gaussian_line_spectrum(w1, 1.0, sigma);
        const double peak = ls.envelope_at(0.0);
        const double tail = ls.envelope_at(k_high);
        if (!first) {
            CHECK(peak < prev_peak);  // low end strictly suppressed
            CHECK(tail > prev_tail);  // high end strictly raised
        }
        prev_peak = peak;
        prev_tail = tail;
        first = false;
    }
}

TEST_CASE("oracle equivalence: shallow nets concentrate on their analytic lines") {
    // Gaussian pair with separated directions.
    const Network gauss = shallow_net({{10.0, 4.0}, {-4.0, 11.0}}, {1.0, 0.8},
                                      ActivationKind::gaussian(0.5));
    const auto rep = verify_line_concentration(gauss, 256, 3.0);
    for (double c : rep.correlations) CHECK(c > 0.99);
    CHECK(rep.off_line_fraction < 0.05);

    // Sine pair: exact delta lines.
    const Network sine = shallow_net({{4.0, 1.0}, {-1.0, 3.0}}, {1.0, 0.6},
                                     ActivationKind::sine(2.0));
    const SpectrumGrid spec = dft(mean_subtracted(sample_grid(sine, 256)), true);
    const double off = off_line_energy(spec, {{4.0, 1.0}, {-1.0, 3.0}}, 3.0);
    CHECK(off < 0.05);
}

TEST_CASE("parallel weight vectors put the whole spectrum on a single line") {
    const Network net = shallow_net({{4.0, 3.0}, {8.0, 6.0}}, {1.0, 0.5},
                                    ActivationKind::gaussian(0.4));
    const SpectrumGrid spec = dft(mean_subtracted(sample_grid(net, 256)), true);
    const double off = off_line_energy(spec, {{4.0, 3.0}}, 3.0);
    CHECK(off < 0.05);
}
