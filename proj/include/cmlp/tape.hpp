#pragma once

#include <cstddef>
#include <vector>

#include "cmlp/activation.hpp"
#include "cmlp/matrix.hpp"

namespace cmlp {

// Reverse-mode gradient tape specialized to feed-forward MLP graphs.
// A tape records one forward pass (nodes hold matrix values; batch samples
// live in columns) and is replayed backward once. Rebuild per step.
class Tape {
public:
    using NodeId = std::size_t;

    // Leaf holding a copy of `m`; gradients are accumulated for it.
    NodeId parameter(const Matrix& m);
    // Leaf without gradient.
    NodeId constant(Matrix m);

    // W (out x in) * X (in x B) + b (out x 1) broadcast over columns.
    NodeId affine(NodeId w, NodeId b, NodeId x);
    // Pointwise activation.
    NodeId activation(NodeId z, const ActivationKind& act);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId hadamard(NodeId a, NodeId b);
    NodeId scale(NodeId a, double c);
    // Row vector (1 x B) of scale[j] * ||column j||_2.
    NodeId column_norm(NodeId a, std::vector<double> col_scale);
    // Scalar mean of all entries.
    NodeId mean_all(NodeId a);
    // Scalar sum of all entries.
    NodeId sum_all(NodeId a);
    // Scalar mean squared error against a fixed target of the same shape.
    NodeId mse(NodeId pred, Matrix target);

    const Matrix& value(NodeId id) const { return nodes_[id].value; }
    // Valid after backward(); zero matrix for nodes the loss does not reach.
    const Matrix& grad(NodeId id) const { return nodes_[id].grad; }

    // Accumulates d(output)/d(node) for every node. The output must be
    // scalar (1x1); otherwise throws std::invalid_argument.
    void backward(NodeId output);

    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op {
        Leaf, Affine, Activation, Add, Sub, Hadamard, Scale,
        ColumnNorm, MeanAll, SumAll, Mse
    };

    struct Node {
        Op op;
        Matrix value;
        Matrix grad;
        NodeId a = 0, b = 0, c = 0;
        ActivationKind act{};
        double scalar = 0.0;
        std::vector<double> col_scale;
        Matrix target;
    };

    NodeId push(Node n);

    std::vector<Node> nodes_;
};

}  // namespace cmlp
