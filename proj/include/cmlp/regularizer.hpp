#pragma once

#include <cstddef>
#include <vector>

#include "cmlp/network.hpp"
#include "cmlp/random.hpp"
#include "cmlp/tape.hpp"

namespace cmlp {

// Which features the smoothness penalty acts on.
enum class RegTap { Penultimate, Output };

// Settings of the stochastic smoothness penalty: mean over sampled pairs of
// |g(x) - g(x + xi)| / |xi| with x uniform on the domain and
// xi ~ N(0, diag(xi_stddevs^2)).
struct RegConfig {
    double epsilon = 0.0;                  // loss weight
    std::vector<double> xi_stddevs{0.01};  // per axis; broadcast when size 1
    std::size_t n_pairs = 0;               // 0 = match the batch size
    RegTap tap = RegTap::Penultimate;
    // Draw the probe centers from the training coordinates instead of
    // uniformly over the domain.
    bool probe_at_train_coords = false;

    // Throws std::invalid_argument when stddevs are out of (0, 0.1] or the
    // axis count does not match.
    void validate(std::size_t input_dim) const;
    std::vector<double> xi_for_dim(std::size_t input_dim) const;
};

// Frozen probe pairs for one loss evaluation.
struct RegPairs {
    Matrix x_base;                    // n x P
    Matrix x_shift;                   // n x P, x_base + xi
    std::vector<double> inv_xi_norm;  // 1 / |xi_p|
};

// Pairs with |xi| below 1e-12 are redrawn. `train_coords` may be null unless
// cfg.probe_at_train_coords is set.
RegPairs draw_reg_pairs(const RegConfig& cfg, std::size_t input_dim, std::size_t n_pairs,
                        RandomSource& rng, const Matrix* train_coords = nullptr);

// The recorded total loss: MSE over the batch plus epsilon times the
// smoothness penalty, differentiable w.r.t. every network parameter.
// With epsilon = 0 the graph is exactly the MSE graph.
struct LossGraph {
    Tape tape;
    Tape::NodeId total = 0;
    Tape::NodeId mse_node = 0;
    Tape::NodeId reg_node = 0;
    bool has_reg = false;
    std::vector<Tape::NodeId> param_nodes;  // for_each_param order

    double value() const { return tape.value(total)[0]; }
    double mse_value() const { return tape.value(mse_node)[0]; }
    double reg_value() const { return has_reg ? tape.value(reg_node)[0] : 0.0; }
};

// `embedded_coords` may carry the precomputed RFF embedding of `coords`
// (2D x B) to avoid re-embedding static training sets.
LossGraph build_loss_graph(const Network& net, const Matrix& coords, const Matrix& targets,
                           const RegConfig& cfg, RandomSource& rng,
                           const Matrix* embedded_coords = nullptr,
                           const Matrix* train_coords = nullptr);

// Value of the smoothness penalty alone.
double reg_loss(const Network& net, const RegConfig& cfg, RandomSource& rng);
double reg_loss_from_pairs(const Network& net, const RegPairs& pairs, RegTap tap);

// MSE + epsilon * reg_loss on a batch (coords n x B, targets m_out x B).
double total_loss(const Network& net, const Matrix& coords, const Matrix& targets,
                  const RegConfig& cfg, RandomSource& rng);

// Finite-difference Jacobian of the tapped features at a point and the
// eigenstructure of A = J J^T. J is stored with input axes as rows
// (n x d), so A is n x n and its eigenvectors are domain directions.
struct JacobianAnalysis {
    Matrix jac;                        // n x d
    Matrix a;                          // n x n, J J^T
    std::vector<double> eigenvalues;   // descending
    Matrix eigenvectors;               // columns, orthonormal
    double trace = 0.0;
};

// Central differences with step in [1e-6, 1e-3].
JacobianAnalysis jacobian_analysis(const Network& net, std::span<const double> x, double step,
                                   RegTap tap = RegTap::Penultimate);

// Mean of trace(J J^T) over the points; the reference (non-stochastic)
// smoothness measure the sampled penalty approximates.
double trace_penalty(const Network& net, const std::vector<std::vector<double>>& points,
                     double step, RegTap tap = RegTap::Penultimate);

}  // namespace cmlp
