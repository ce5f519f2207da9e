#pragma once

#include <cmath>
#include <vector>

#include "cmlp/matrix.hpp"
#include "cmlp/network.hpp"
#include "cmlp/random.hpp"
#include "cmlp/regularizer.hpp"

namespace cmlp::testing {

// Independent triple-loop product used as the matmul oracle.
inline Matrix matmul_naive(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, RandomSource& rng,
                            double scale = 1.0) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = scale * rng.normal();
    return m;
}

// Loss evaluated through the plain (non-tape) forward path; the pairs are
// redrawn from a fresh RandomSource each call so the loss is a deterministic
// function of the parameters only.
inline double loss_by_forward(const Network& net, const Matrix& coords, const Matrix& targets,
                              const RegConfig& cfg, std::uint64_t pair_seed) {
    Matrix out = forward_batch(net, coords);
    double mse = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out[i] - targets[i];
        mse += d * d;
    }
    mse /= static_cast<double>(out.size());
    if (!(cfg.epsilon > 0.0)) return mse;
    RandomSource rng(pair_seed);
    const std::size_t n_pairs = cfg.n_pairs ? cfg.n_pairs : coords.cols();
    const RegPairs pairs = draw_reg_pairs(cfg, net.input_dim, n_pairs, rng);
    return mse + cfg.epsilon * reg_loss_from_pairs(net, pairs, cfg.tap);
}

// Central finite differences of loss_by_forward over every parameter.
// Returns the max relative error against the provided analytic gradients
// (flattened in for_each_param order), using a mixed abs/rel denominator.
inline double max_grad_rel_error(Network& net, const Matrix& coords, const Matrix& targets,
                                 const RegConfig& cfg, std::uint64_t pair_seed,
                                 const std::vector<std::vector<double>>& analytic,
                                 double fd_step) {
    double worst = 0.0;
    std::size_t slot = 0;
    net.for_each_param([&](Matrix& m) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double keep = m[i];
            m[i] = keep + fd_step;
            const double up = loss_by_forward(net, coords, targets, cfg, pair_seed);
            m[i] = keep - fd_step;
            const double dn = loss_by_forward(net, coords, targets, cfg, pair_seed);
            m[i] = keep;
            const double fd = (up - dn) / (2.0 * fd_step);
            const double an = analytic[slot][i];
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
        ++slot;
    });
    return worst;
}

// A small random architecture of the given family.
inline ArchSpec random_arch(RandomSource& rng, ActivationKind::Tag family) {
    ArchSpec spec;
    spec.input_dim = 1 + rng.below(2);
    spec.output_dim = 1;
    const std::size_t depth = 1 + rng.below(4);
    for (std::size_t i = 0; i < depth; ++i) spec.hidden_widths.push_back(4 + rng.below(29));
    switch (family) {
        case ActivationKind::Tag::Gaussian:
            spec.activation = ActivationKind::gaussian(0.2 + rng.uniform01() * 0.8);
            break;
        case ActivationKind::Tag::Sine:
            spec.activation = ActivationKind::sine(0.5 + rng.uniform01() * 2.0);
            break;
        case ActivationKind::Tag::Relu:
            spec.activation = ActivationKind::relu();
            spec.use_rff = true;
            spec.rff_D = 4 + rng.below(13);
            spec.rff_sigma = 0.5 + rng.uniform01();
            break;
    }
    return spec;
}

}  // namespace cmlp::testing
