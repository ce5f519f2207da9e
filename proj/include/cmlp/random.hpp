#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cmlp {

// Seeded deterministic random source. The draw sequence is fully determined
// by (seed, call sequence); normal variates use Box-Muller on top of the
// mt19937_64 bit stream so results are identical across platforms.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform on [0, 1).
    double uniform01();
    // Uniform on [a, b).
    double uniform(double a, double b);
    // Standard normal draw.
    double normal();
    // n independent N(mean, stddev^2) draws. Throws std::invalid_argument
    // if stddev <= 0.
    std::vector<double> gauss_draw(double mean, double stddev, std::size_t n);
    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    // Derives an independent seed for a worker/cell; splitmix64 of
    // (seed, index) so cells never share streams.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace cmlp
