#include "cmlp/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace cmlp {

Tape::NodeId Tape::push(Node n) {
    n.grad = Matrix(n.value.rows(), n.value.cols());
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

Tape::NodeId Tape::parameter(const Matrix& m) {
    Node n;
    n.op = Op::Leaf;
    n.value = m;
    return push(std::move(n));
}

Tape::NodeId Tape::constant(Matrix m) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(m);
    return push(std::move(n));
}

Tape::NodeId Tape::affine(NodeId w, NodeId b, NodeId x) {
    const Matrix& W = nodes_[w].value;
    const Matrix& B = nodes_[b].value;
    const Matrix& X = nodes_[x].value;
    if (W.cols() != X.rows()) throw std::invalid_argument("affine: W.cols != X.rows");
    if (B.rows() != W.rows() || B.cols() != 1)
        throw std::invalid_argument("affine: bias must be (out x 1)");
    Node n;
    n.op = Op::Affine;
    n.a = w; n.b = b; n.c = x;
    n.value = matmul(W, X);
    for (std::size_t i = 0; i < n.value.rows(); ++i) {
        const double bi = B(i, 0);
        for (std::size_t j = 0; j < n.value.cols(); ++j) n.value(i, j) += bi;
    }
    return push(std::move(n));
}

Tape::NodeId Tape::activation(NodeId z, const ActivationKind& act) {
    Node n;
    n.op = Op::Activation;
    n.a = z;
    n.act = act;
    const Matrix& Z = nodes_[z].value;
    n.value = Matrix(Z.rows(), Z.cols());
    for (std::size_t i = 0; i < Z.size(); ++i) n.value[i] = act.apply(Z[i]);
    return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    Node n;
    n.op = Op::Add;
    n.a = a; n.b = b;
    n.value = cmlp::add(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
    Node n;
    n.op = Op::Sub;
    n.a = a; n.b = b;
    n.value = cmlp::sub(nodes_[a].value, nodes_[b].value);
    return push(std::move(n));
}

Tape::NodeId Tape::hadamard(NodeId a, NodeId b) {
    const Matrix& A = nodes_[a].value;
    const Matrix& B = nodes_[b].value;
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("hadamard: shape mismatch");
    Node n;
    n.op = Op::Hadamard;
    n.a = a; n.b = b;
    n.value = Matrix(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) n.value[i] = A[i] * B[i];
    return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a;
    n.scalar = c;
    n.value = cmlp::scale(nodes_[a].value, c);
    return push(std::move(n));
}

Tape::NodeId Tape::column_norm(NodeId a, std::vector<double> col_scale) {
    const Matrix& A = nodes_[a].value;
    if (col_scale.size() != A.cols())
        throw std::invalid_argument("column_norm: scale length != cols");
    Node n;
    n.op = Op::ColumnNorm;
    n.a = a;
    n.value = Matrix(1, A.cols());
    for (std::size_t j = 0; j < A.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows(); ++i) s += A(i, j) * A(i, j);
        n.value(0, j) = col_scale[j] * std::sqrt(s);
    }
    n.col_scale = std::move(col_scale);
    return push(std::move(n));
}

Tape::NodeId Tape::mean_all(NodeId a) {
    Node n;
    n.op = Op::MeanAll;
    n.a = a;
    const Matrix& A = nodes_[a].value;
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
    n.value = Matrix(1, 1);
    n.value[0] = A.size() ? s / static_cast<double>(A.size()) : 0.0;
    return push(std::move(n));
}

Tape::NodeId Tape::sum_all(NodeId a) {
    Node n;
    n.op = Op::SumAll;
    n.a = a;
    const Matrix& A = nodes_[a].value;
    double s = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
    n.value = Matrix(1, 1);
    n.value[0] = s;
    return push(std::move(n));
}

Tape::NodeId Tape::mse(NodeId pred, Matrix target) {
    const Matrix& P = nodes_[pred].value;
    if (P.rows() != target.rows() || P.cols() != target.cols())
        throw std::invalid_argument("mse: target shape mismatch");
    Node n;
    n.op = Op::Mse;
    n.a = pred;
    double s = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = P[i] - target[i];
        s += d * d;
    }
    n.value = Matrix(1, 1);
    n.value[0] = P.size() ? s / static_cast<double>(P.size()) : 0.0;
    n.target = std::move(target);
    return push(std::move(n));
}

void Tape::backward(NodeId output) {
    Node& out = nodes_[output];
    if (out.value.rows() != 1 || out.value.cols() != 1)
        throw std::invalid_argument("backward: output must be scalar");
    for (Node& n : nodes_) n.grad.fill(0.0);
    out.grad[0] = 1.0;

    for (std::size_t idx = output + 1; idx-- > 0;) {
        Node& n = nodes_[idx];
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Affine: {
                // Y = W X + b 1^T: dW += g X^T, dX += W^T g, db += row-sum g.
                Node& wn = nodes_[n.a];
                Node& bn = nodes_[n.b];
                Node& xn = nodes_[n.c];
                matmul_acc(g, transpose(xn.value), wn.grad);
                matmul_acc(transpose(wn.value), g, xn.grad);
                for (std::size_t i = 0; i < g.rows(); ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j);
                    bn.grad(i, 0) += s;
                }
                break;
            }
            case Op::Activation: {
                Node& zn = nodes_[n.a];
                for (std::size_t i = 0; i < g.size(); ++i)
                    zn.grad[i] += g[i] * n.act.derivative(zn.value[i]);
                break;
            }
            case Op::Add: {
                Node& an = nodes_[n.a];
                Node& bn = nodes_[n.b];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    an.grad[i] += g[i];
                    bn.grad[i] += g[i];
                }
                break;
            }
            case Op::Sub: {
                Node& an = nodes_[n.a];
                Node& bn = nodes_[n.b];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    an.grad[i] += g[i];
                    bn.grad[i] -= g[i];
                }
                break;
            }
            case Op::Hadamard: {
                Node& an = nodes_[n.a];
                Node& bn = nodes_[n.b];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    an.grad[i] += g[i] * bn.value[i];
                    bn.grad[i] += g[i] * an.value[i];
                }
                break;
            }
            case Op::Scale: {
                Node& an = nodes_[n.a];
                for (std::size_t i = 0; i < g.size(); ++i) an.grad[i] += g[i] * n.scalar;
                break;
            }
            case Op::ColumnNorm: {
                // r_j = s_j * ||a_j||; dr/da_ij = s_j a_ij / ||a_j||.
                Node& an = nodes_[n.a];
                const Matrix& A = an.value;
                for (std::size_t j = 0; j < A.cols(); ++j) {
                    const double r = n.value(0, j);
                    if (r == 0.0) continue;  // subgradient 0 at the kink
                    const double f = g(0, j) * n.col_scale[j] * n.col_scale[j] / r;
                    for (std::size_t i = 0; i < A.rows(); ++i)
                        an.grad(i, j) += f * A(i, j);
                }
                break;
            }
            case Op::MeanAll: {
                Node& an = nodes_[n.a];
                const double f = g[0] / static_cast<double>(an.value.size());
                for (std::size_t i = 0; i < an.grad.size(); ++i) an.grad[i] += f;
                break;
            }
            case Op::SumAll: {
                Node& an = nodes_[n.a];
                for (std::size_t i = 0; i < an.grad.size(); ++i) an.grad[i] += g[0];
                break;
            }
            case Op::Mse: {
                Node& an = nodes_[n.a];
                const double f = 2.0 * g[0] / static_cast<double>(an.value.size());
                for (std::size_t i = 0; i < an.grad.size(); ++i)
                    an.grad[i] += f * (an.value[i] - n.target[i]);
                break;
            }
        }
    }
}

}  // namespace cmlp
