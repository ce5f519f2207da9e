#include "cmlp/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cmlp {

double psnr(const std::vector<double>& pred, const std::vector<double>& target,
            const std::vector<std::size_t>& subset) {
    if (pred.size() != target.size()) throw std::invalid_argument("psnr: length mismatch");
    if (subset.empty()) throw std::invalid_argument("psnr: empty subset");
    double mse = 0.0;
    for (std::size_t i : subset) {
        if (i >= pred.size()) throw std::invalid_argument("psnr: index out of range");
        const double d = pred[i] - target[i];
        mse += d * d;
    }
    mse /= static_cast<double>(subset.size());
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

std::vector<double> predict(const Network& net, const SignalDataset& dataset) {
    const Matrix out = forward_batch(net, dataset.coords);
    std::vector<double> pred(dataset.count());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = out(0, i);
    return pred;
}

Metrics evaluate(const Network& net, const SignalDataset& dataset, bool clamp01) {
    std::vector<double> pred = predict(net, dataset);
    if (clamp01)
        for (double& v : pred) v = std::clamp(v, 0.0, 1.0);

    std::vector<std::size_t> all(dataset.count()), left, right;
    for (std::size_t i = 0; i < dataset.count(); ++i) {
        all[i] = i;
        (dataset.region[i] == 0 ? left : right).push_back(i);
    }
    Metrics m;
    double mse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - dataset.targets[i];
        mse += d * d;
    }
    m.mse = mse / static_cast<double>(pred.size());
    m.t_psnr = psnr(pred, dataset.targets, all);
    m.l_psnr = left.empty() ? 0.0 : psnr(pred, dataset.targets, left);
    m.r_psnr = right.empty() ? 0.0 : psnr(pred, dataset.targets, right);
    return m;
}

namespace {

Matrix gather_cols(const Matrix& src, const std::vector<std::size_t>& idx,
                   std::size_t offset, std::size_t count) {
    Matrix out(src.rows(), count);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t col = idx[offset + j];
        for (std::size_t i = 0; i < src.rows(); ++i) out(i, j) = src(i, col);
    }
    return out;
}

struct AdamState {
    std::vector<Matrix> m, v;
};

}  // namespace

TrainResult train(const SignalDataset& dataset, const TrainConfig& cfg) {
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: lr must be > 0");
    const std::vector<std::size_t> train_idx = dataset.train_indices();
    if (train_idx.empty()) throw std::invalid_argument("train: empty train set");
    if (cfg.arch.input_dim != dataset.input_dim)
        throw std::invalid_argument("train: architecture input dim does not match dataset");

    RandomSource rng(cfg.seed);
    Network net = init_network(cfg.arch, rng);

    const std::size_t T = train_idx.size();
    const std::size_t B =
        cfg.batch_size ? std::min(cfg.batch_size, T) : (T <= 4096 ? T : std::size_t{1024});

    // Static per-point data, gathered once.
    Matrix Xtr(dataset.input_dim, T);
    Matrix Ytr(1, T);
    for (std::size_t j = 0; j < T; ++j) {
        for (std::size_t i = 0; i < dataset.input_dim; ++i)
            Xtr(i, j) = dataset.coords(i, train_idx[j]);
        Ytr(0, j) = dataset.targets[train_idx[j]];
    }
    Matrix Etr;
    const bool has_rff = net.rff.has_value();
    if (has_rff) Etr = rff_embed_batch(*net.rff, Xtr);

    RegConfig reg = cfg.reg;
    if (reg.epsilon > 0.0 && reg.n_pairs == 0) reg.n_pairs = B;

    AdamState adam;
    std::vector<Matrix*> params;
    net.for_each_param([&](Matrix& m) { params.push_back(&m); });
    if (cfg.optimizer == TrainConfig::Optimizer::Adam) {
        for (Matrix* p : params) {
            adam.m.emplace_back(p->rows(), p->cols());
            adam.v.emplace_back(p->rows(), p->cols());
        }
    }

    const bool full_batch = B == T;
    std::vector<std::size_t> order(T);
    for (std::size_t i = 0; i < T; ++i) order[i] = i;
    std::size_t cursor = T;  // force an initial shuffle in minibatch mode

    Metrics metrics;
    metrics.loss_history.reserve(cfg.steps);

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        Matrix Xb, Yb, Eb;
        const Matrix* emb = nullptr;
        if (full_batch) {
            Xb = Xtr;
            Yb = Ytr;
            if (has_rff) emb = &Etr;
        } else {
            if (cursor + B > T) {
                for (std::size_t i = T - 1; i > 0; --i) {
                    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
                    std::swap(order[i], order[j]);
                }
                cursor = 0;
            }
            Xb = gather_cols(Xtr, order, cursor, B);
            Yb = gather_cols(Ytr, order, cursor, B);
            if (has_rff) {
                Eb = gather_cols(Etr, order, cursor, B);
                emb = &Eb;
            }
            cursor += B;
        }

        LossGraph g;
        try {
            g = build_loss_graph(net, Xb, Yb, reg, rng, emb, &Xtr);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("train: diverged at step " + std::to_string(step) + ": " +
                                     e.what());
        }
        const double loss = g.value();
        if (!std::isfinite(loss))
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));
        metrics.loss_history.push_back(loss);

        g.tape.backward(g.total);

        const double t = static_cast<double>(step + 1);
        for (std::size_t p = 0; p < params.size(); ++p) {
            Matrix& w = *params[p];
            const Matrix& grad = g.tape.grad(g.param_nodes[p]);
            if (cfg.optimizer == TrainConfig::Optimizer::Sgd) {
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.lr * grad[i];
            } else {
                Matrix& m1 = adam.m[p];
                Matrix& m2 = adam.v[p];
                const double c1 = 1.0 - std::pow(cfg.beta1, t);
                const double c2 = 1.0 - std::pow(cfg.beta2, t);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * grad[i];
                    m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
                    const double mhat = m1[i] / c1;
                    const double vhat = m2[i] / c2;
                    w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
                }
            }
        }
    }

    // Intensity-style signals (targets within [0,1]) are clamped before the
    // PSNR; waveforms are left as-is.
    bool clamp01 = true;
    for (double v : dataset.targets)
        if (v < 0.0 || v > 1.0) {
            clamp01 = false;
            break;
        }
    const Metrics eval = evaluate(net, dataset, clamp01);
    metrics.t_psnr = eval.t_psnr;
    metrics.l_psnr = eval.l_psnr;
    metrics.r_psnr = eval.r_psnr;
    metrics.mse = eval.mse;
    return {std::move(net), std::move(metrics)};
}

}  // namespace cmlp
