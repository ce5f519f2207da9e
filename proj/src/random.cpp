#include "cmlp/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmlp {

double RandomSource::uniform01() {
    // 53-bit mantissa in [0, 1).
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform: need a < b");
    return a + (b - a) * uniform01();
}

double RandomSource::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so log is finite.
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

std::vector<double> RandomSource::gauss_draw(double mean, double stddev, std::size_t n) {
    if (!(stddev > 0.0)) throw std::invalid_argument("gauss_draw: stddev must be > 0");
    std::vector<double> out(n);
    for (double& v : out) v = mean + stddev * normal();
    return out;
}

std::uint64_t RandomSource::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n must be > 0");
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

std::uint64_t RandomSource::derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace cmlp
