#include "cmlp/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmlp {

void RegConfig::validate(std::size_t input_dim) const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("RegConfig: epsilon must be >= 0");
    if (xi_stddevs.empty() || (xi_stddevs.size() != 1 && xi_stddevs.size() != input_dim))
        throw std::invalid_argument("RegConfig: xi_stddevs must have 1 or input_dim entries");
    for (double s : xi_stddevs)
        if (!(s > 0.0) || s > 0.1)
            throw std::invalid_argument("RegConfig: xi stddevs must lie in (0, 0.1]");
}

std::vector<double> RegConfig::xi_for_dim(std::size_t input_dim) const {
    if (xi_stddevs.size() == input_dim) return xi_stddevs;
    return std::vector<double>(input_dim, xi_stddevs[0]);
}

RegPairs draw_reg_pairs(const RegConfig& cfg, std::size_t input_dim, std::size_t n_pairs,
                        RandomSource& rng, const Matrix* train_coords) {
    if (n_pairs == 0) throw std::invalid_argument("draw_reg_pairs: need at least one pair");
    if (cfg.probe_at_train_coords && (!train_coords || train_coords->cols() == 0))
        throw std::invalid_argument("draw_reg_pairs: no training coordinates to probe");
    const std::vector<double> stddevs = cfg.xi_for_dim(input_dim);

    RegPairs pairs;
    pairs.x_base = Matrix(input_dim, n_pairs);
    pairs.x_shift = Matrix(input_dim, n_pairs);
    pairs.inv_xi_norm.resize(n_pairs);
    std::vector<double> base(input_dim), xi(input_dim);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        double norm = 0.0;
        do {
            if (cfg.probe_at_train_coords) {
                const std::size_t idx = rng.below(train_coords->cols());
                for (std::size_t i = 0; i < input_dim; ++i) base[i] = (*train_coords)(i, idx);
            } else {
                for (std::size_t i = 0; i < input_dim; ++i) base[i] = rng.uniform(-1.0, 1.0);
            }
            double s = 0.0;
            for (std::size_t i = 0; i < input_dim; ++i) {
                xi[i] = stddevs[i] * rng.normal();
                s += xi[i] * xi[i];
            }
            norm = std::sqrt(s);
        } while (norm < 1e-12);
        for (std::size_t i = 0; i < input_dim; ++i) {
            pairs.x_base(i, p) = base[i];
            pairs.x_shift(i, p) = base[i] + xi[i];
        }
        pairs.inv_xi_norm[p] = 1.0 / norm;
    }
    return pairs;
}

namespace {

// Forward one input batch on the tape up to the tapped features and,
// optionally, the network output.
struct TowerNodes {
    Tape::NodeId penultimate = 0;
    Tape::NodeId output = 0;
};

TowerNodes build_tower(Tape& tape, const Network& net, Tape::NodeId input,
                       const std::vector<Tape::NodeId>& params, bool want_output) {
    Tape::NodeId h = input;
    std::size_t pi = 0;
    for (const Layer& l : net.hidden) {
        const Tape::NodeId w = params[pi++];
        const Tape::NodeId b = params[pi++];
        h = tape.activation(tape.affine(w, b, h), l.act);
    }
    TowerNodes t;
    t.penultimate = h;
    if (want_output) {
        const Tape::NodeId w = params[pi++];
        const Tape::NodeId b = params[pi++];
        t.output = tape.affine(w, b, h);
    }
    return t;
}

Matrix embed_if_needed(const Network& net, const Matrix& coords) {
    return net.rff ? rff_embed_batch(*net.rff, coords) : coords;
}

}  // namespace

LossGraph build_loss_graph(const Network& net, const Matrix& coords, const Matrix& targets,
                           const RegConfig& cfg, RandomSource& rng,
                           const Matrix* embedded_coords, const Matrix* train_coords) {
    if (coords.cols() == 0) throw std::invalid_argument("build_loss_graph: empty batch");
    cfg.validate(net.input_dim);

    LossGraph g;
    // Parameters first, in for_each_param order, so gradients map back by
    // position.
    net.for_each_param(
        [&](const Matrix& m) { g.param_nodes.push_back(g.tape.parameter(m)); });

    const Matrix embedded =
        embedded_coords ? *embedded_coords : embed_if_needed(net, coords);
    const Tape::NodeId x = g.tape.constant(embedded);
    const TowerNodes mse_tower = build_tower(g.tape, net, x, g.param_nodes, true);
    g.mse_node = g.tape.mse(mse_tower.output, targets);

    if (cfg.epsilon > 0.0) {
        const std::size_t n_pairs = cfg.n_pairs ? cfg.n_pairs : coords.cols();
        const RegPairs pairs =
            draw_reg_pairs(cfg, net.input_dim, n_pairs, rng, train_coords);
        const Tape::NodeId xb = g.tape.constant(embed_if_needed(net, pairs.x_base));
        const Tape::NodeId xs = g.tape.constant(embed_if_needed(net, pairs.x_shift));
        const bool want_out = cfg.tap == RegTap::Output;
        const TowerNodes t1 = build_tower(g.tape, net, xb, g.param_nodes, want_out);
        const TowerNodes t2 = build_tower(g.tape, net, xs, g.param_nodes, want_out);
        const Tape::NodeId g1 = want_out ? t1.output : t1.penultimate;
        const Tape::NodeId g2 = want_out ? t2.output : t2.penultimate;
        const Tape::NodeId diff = g.tape.sub(g1, g2);
        g.reg_node = g.tape.mean_all(g.tape.column_norm(diff, pairs.inv_xi_norm));
        g.has_reg = true;
        g.total = g.tape.add(g.mse_node, g.tape.scale(g.reg_node, cfg.epsilon));
    } else {
        g.total = g.mse_node;
    }
    return g;
}

double reg_loss_from_pairs(const Network& net, const RegPairs& pairs, RegTap tap) {
    Matrix pen1, pen2;
    const Matrix out1 = forward_batch(net, pairs.x_base, &pen1);
    const Matrix out2 = forward_batch(net, pairs.x_shift, &pen2);
    const Matrix& g1 = tap == RegTap::Output ? out1 : pen1;
    const Matrix& g2 = tap == RegTap::Output ? out2 : pen2;
    double acc = 0.0;
    for (std::size_t p = 0; p < g1.cols(); ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < g1.rows(); ++i) {
            const double d = g1(i, p) - g2(i, p);
            s += d * d;
        }
        acc += pairs.inv_xi_norm[p] * std::sqrt(s);
    }
    return acc / static_cast<double>(g1.cols());
}

double reg_loss(const Network& net, const RegConfig& cfg, RandomSource& rng) {
    cfg.validate(net.input_dim);
    const std::size_t n_pairs = cfg.n_pairs ? cfg.n_pairs : 1;
    const RegPairs pairs = draw_reg_pairs(cfg, net.input_dim, n_pairs, rng);
    return reg_loss_from_pairs(net, pairs, cfg.tap);
}

double total_loss(const Network& net, const Matrix& coords, const Matrix& targets,
                  const RegConfig& cfg, RandomSource& rng) {
    const LossGraph g = build_loss_graph(net, coords, targets, cfg, rng);
    return g.value();
}

namespace {

// Cyclic Jacobi eigendecomposition for symmetric matrices.
void symmetric_eigen(const Matrix& a, std::vector<double>& values, Matrix& vectors) {
    const std::size_t n = a.rows();
    Matrix d = a;
    Matrix v = Matrix::identity(n);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += d(p, q) * d(p, q);
        if (off < 1e-26) break;
        if (sweep == max_sweeps - 1)
            throw std::runtime_error("symmetric_eigen: Jacobi sweep did not converge");
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (d(p, q) == 0.0) continue;
                const double theta = (d(q, q) - d(p, p)) / (2.0 * d(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double dkp = d(k, p), dkq = d(k, q);
                    d(k, p) = c * dkp - s * dkq;
                    d(k, q) = s * dkp + c * dkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double dpk = d(p, k), dqk = d(q, k);
                    d(p, k) = c * dpk - s * dqk;
                    d(q, k) = s * dpk + c * dqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // Sort descending, carrying the eigenvector columns along.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return d(i, i) > d(j, j); });
    values.resize(n);
    vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        values[j] = d(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) vectors(i, j) = v(i, order[j]);
    }
}

Matrix tapped_features(const Network& net, const Matrix& X, RegTap tap) {
    Matrix pen;
    Matrix out = forward_batch(net, X, &pen);
    return tap == RegTap::Output ? out : pen;
}

}  // namespace

JacobianAnalysis jacobian_analysis(const Network& net, std::span<const double> x, double step,
                                   RegTap tap) {
    if (!(step >= 1e-6 && step <= 1e-3))
        throw std::invalid_argument("jacobian_analysis: step must be in [1e-6, 1e-3]");
    if (x.size() != net.input_dim)
        throw std::invalid_argument("jacobian_analysis: coordinate dimension mismatch");
    const std::size_t n = net.input_dim;

    // Probe all 2n shifted points in one batch.
    Matrix X(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            X(j, 2 * i) = x[j];
            X(j, 2 * i + 1) = x[j];
        }
        X(i, 2 * i) += step;
        X(i, 2 * i + 1) -= step;
    }
    const Matrix feats = tapped_features(net, X, tap);
    const std::size_t d = feats.rows();

    JacobianAnalysis ja;
    ja.jac = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            ja.jac(i, j) = (feats(j, 2 * i) - feats(j, 2 * i + 1)) / (2.0 * step);
    ja.a = matmul(ja.jac, transpose(ja.jac));
    ja.trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) ja.trace += ja.a(i, i);
    symmetric_eigen(ja.a, ja.eigenvalues, ja.eigenvectors);
    return ja;
}

double trace_penalty(const Network& net, const std::vector<std::vector<double>>& points,
                     double step, RegTap tap) {
    if (points.empty()) throw std::invalid_argument("trace_penalty: no points");
    double acc = 0.0;
    for (const auto& p : points) acc += jacobian_analysis(net, p, step, tap).trace;
    return acc / static_cast<double>(points.size());
}

}  // namespace cmlp
