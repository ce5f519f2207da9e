#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmlp/regularizer.hpp"
#include "helpers.hpp"

using namespace cmlp;

namespace {

Network linear_net_1d(double c) {
    ArchSpec spec;
    spec.input_dim = 1;
    spec.output_dim = 1;
    RandomSource rng(1);
    Network net = init_network(spec, rng);
    net.w_out(0, 0) = c;
    net.b_out(0, 0) = 0.25;
    return net;
}

Network linear_net(const Matrix& M) {
    ArchSpec spec;
    spec.input_dim = M.cols();
    spec.output_dim = M.rows();
    RandomSource rng(1);
    Network net = init_network(spec, rng);
    net.w_out = M;
    net.b_out.fill(0.0);
    return net;
}

Network constant_feature_net() {
    ArchSpec spec;
    spec.input_dim = 2;
    spec.hidden_widths = {6};
    spec.activation = ActivationKind::gaussian(0.5);
    RandomSource rng(2);
    Network net = init_network(spec, rng);
    net.hidden[0].W.fill(0.0);  // features are act(b), independent of x
    return net;
}

Network smooth_net(std::uint64_t seed, std::size_t input_dim = 2) {
    ArchSpec spec;
    spec.input_dim = input_dim;
    spec.hidden_widths = {16, 16};
    spec.activation = ActivationKind::gaussian(0.9);
    RandomSource rng(seed);
    return init_network(spec, rng);
}

}  // namespace

TEST_CASE("reg_loss vanishes on constant features") {
    const Network net = constant_feature_net();
    RegConfig cfg;
    cfg.n_pairs = 64;
    RandomSource rng(3);
    CHECK(reg_loss(net, cfg, rng) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("reg_loss equals |c| for 1D linear features") {
    const Network net = linear_net_1d(-2.75);
    RegConfig cfg;
    cfg.tap = RegTap::Output;
    cfg.n_pairs = 32;
    RandomSource rng(4);
    CHECK(reg_loss(net, cfg, rng) == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("reg_loss with 1024 pairs sits within 5% of a dense Monte-Carlo estimate") {
    const Network net = smooth_net(11, 1);
    RegConfig cfg;
    cfg.n_pairs = 1024;
    RandomSource rng(5);
    const double sampled = reg_loss(net, cfg, rng);

    RegConfig dense = cfg;
    dense.n_pairs = 120000;
    RandomSource rng2(777);
    const double reference = reg_loss(net, dense, rng2);
    CHECK(sampled == doctest::Approx(reference).epsilon(0.05));
}

TEST_CASE("total_loss with epsilon 0 is exactly the MSE") {
    const Network net = smooth_net(7);
    RandomSource rng(8);
    Matrix coords(2, 16), targets(1, 16);
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = rng.uniform(-1.0, 1.0);

    const Matrix out = forward_batch(net, coords);
    double mse = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out[i] - targets[i];
        mse += d * d;
    }
    mse /= static_cast<double>(out.size());

    RegConfig cfg;  // epsilon = 0
    RandomSource loss_rng(1);
    CHECK(total_loss(net, coords, targets, cfg, loss_rng) == mse);
}

TEST_CASE("total_loss recomputation oracle agrees to 1e-12") {
    const Network net = smooth_net(19);
    RandomSource rng(20);
    Matrix coords(2, 24), targets(1, 24);
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = rng.uniform(-1.0, 1.0);

    RegConfig cfg;
    cfg.epsilon = 0.037;
    cfg.n_pairs = 48;
    const std::uint64_t pair_seed = 99;

    RandomSource r1(pair_seed);
    const double via_graph = total_loss(net, coords, targets, cfg, r1);
    const double via_forward =
        cmlp::testing::loss_by_forward(net, coords, targets, cfg, pair_seed);
    CHECK(via_graph == doctest::Approx(via_forward).epsilon(1e-12));
}

TEST_CASE("perfect fit with constant features gives zero total loss") {
    const Network net = constant_feature_net();
    const std::vector<double> x{0.2, -0.4};
    const double y = forward(net, x)[0];
    Matrix coords(2, 1, {0.2, -0.4});
    Matrix targets(1, 1, {y});
    RegConfig cfg;
    cfg.epsilon = 0.5;
    cfg.n_pairs = 16;
    RandomSource rng(2);
    CHECK(total_loss(net, coords, targets, cfg, rng) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("jacobian_analysis recovers a linear map") {
    RandomSource rng(31);
    Matrix M(3, 2);
    for (std::size_t i = 0; i < M.size(); ++i) M[i] = rng.normal();
    const Network net = linear_net(M);
    const auto ja =
        jacobian_analysis(net, std::vector<double>{0.1, -0.3}, 1e-4, RegTap::Output);
    // J rows are input axes, so J = M^T up to O(step^2).
    REQUIRE(ja.jac.rows() == 2);
    REQUIRE(ja.jac.cols() == 3);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(ja.jac(i, j) == doctest::Approx(M(j, i)).epsilon(1e-7));
}

TEST_CASE("trace of A equals the squared Frobenius norm of J") {
    const Network net = smooth_net(41);
    const auto ja = jacobian_analysis(net, std::vector<double>{0.3, 0.2}, 1e-4);
    double frob2 = 0.0;
    for (std::size_t i = 0; i < ja.jac.size(); ++i) frob2 += ja.jac[i] * ja.jac[i];
    CHECK(ja.trace == doctest::Approx(frob2).epsilon(1e-10));
    // Eigenvalues sum to the trace; eigenvectors are orthonormal.
    double sum = 0.0;
    for (double l : ja.eigenvalues) sum += l;
    CHECK(sum == doctest::Approx(ja.trace).epsilon(1e-8));
    for (std::size_t i = 0; i < ja.eigenvectors.cols(); ++i)
        for (std::size_t j = 0; j < ja.eigenvectors.cols(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < ja.eigenvectors.rows(); ++k)
                d += ja.eigenvectors(k, i) * ja.eigenvectors(k, j);
            CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
        }
}

TEST_CASE("directional fluctuation along eigenvectors approaches sqrt(lambda)") {
    const Network net = smooth_net(53);
    const std::vector<double> x{0.15, -0.1};
    const auto ja = jacobian_analysis(net, x, 1e-4);
    Matrix pen0;
    forward_batch(net, Matrix(2, 1, {x[0], x[1]}), &pen0);
    for (std::size_t k = 0; k < ja.eigenvalues.size(); ++k) {
        const double root = std::sqrt(std::max(ja.eigenvalues[k], 0.0));
        if (root < 1e-6) continue;
        auto quotient = [&](double eps) {
            Matrix shifted(2, 1);
            shifted(0, 0) = x[0] + eps * ja.eigenvectors(0, k);
            shifted(1, 0) = x[1] + eps * ja.eigenvectors(1, k);
            Matrix pen1;
            forward_batch(net, shifted, &pen1);
            double s = 0.0;
            for (std::size_t i = 0; i < pen1.size(); ++i) {
                const double d = pen1[i] - pen0[i];
                s += d * d;
            }
            return std::sqrt(s) / eps;
        };
        // Probe at 1e-4 sits within 2% and converges as the probe shrinks.
        CHECK(quotient(1e-4) == doctest::Approx(root).epsilon(0.02));
        CHECK(quotient(1e-3) / quotient(1e-4) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("trace_penalty basics") {
    const Network constant = constant_feature_net();
    CHECK(trace_penalty(constant, {{0.1, 0.2}, {-0.5, 0.4}}, 1e-4) ==
          doctest::Approx(0.0).epsilon(1e-12));
    const Network lin = linear_net_1d(3.0);
    CHECK(trace_penalty(lin, {{0.0}, {0.5}}, 1e-4, RegTap::Output) ==
          doctest::Approx(9.0).epsilon(1e-7));
}

TEST_CASE("trace_penalty rank-correlates with reg_loss across random networks") {
    std::vector<double> tp, rl;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Network net = smooth_net(100 + seed);
        std::vector<std::vector<double>> points;
        RandomSource prng(7);
        for (int i = 0; i < 16; ++i)
            points.push_back({prng.uniform(-1.0, 1.0), prng.uniform(-1.0, 1.0)});
        tp.push_back(trace_penalty(net, points, 1e-4));
        RegConfig cfg;
        cfg.n_pairs = 4096;
        RandomSource rng(7);
        rl.push_back(reg_loss(net, cfg, rng));
    }
    // Spearman rank correlation.
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
        return r;
    };
    const auto ra = ranks(tp), rb = ranks(rl);
    double num = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double d = ra[i] - rb[i];
        num += d * d;
    }
    const double n = static_cast<double>(ra.size());
    const double spearman = 1.0 - 6.0 * num / (n * (n * n - 1.0));
    CHECK(spearman > 0.9);
}

TEST_CASE("reg_loss is invariant under orthogonal feature transforms") {
    RandomSource rng(61);
    Matrix M(3, 2);
    for (std::size_t i = 0; i < M.size(); ++i) M[i] = rng.normal();
    const Network net = linear_net(M);

    // Gram-Schmidt a random 3x3 into Q.
    Matrix Q(3, 3);
    for (std::size_t i = 0; i < Q.size(); ++i) Q[i] = rng.normal();
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            double d = 0.0;
            for (std::size_t r = 0; r < 3; ++r) d += Q(r, c) * Q(r, p);
            for (std::size_t r = 0; r < 3; ++r) Q(r, c) -= d * Q(r, p);
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < 3; ++r) nrm += Q(r, c) * Q(r, c);
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < 3; ++r) Q(r, c) /= nrm;
    }
    Network rotated = net;
    rotated.w_out = matmul(Q, net.w_out);
    rotated.b_out = matmul(Q, net.b_out);

    RegConfig cfg;
    cfg.tap = RegTap::Output;
    cfg.n_pairs = 256;
    RandomSource r1(9), r2(9);
    const double a = reg_loss(net, cfg, r1);
    const double b = reg_loss(rotated, cfg, r2);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("total_loss gradients with the regularizer match finite differences") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RandomSource rng(seed);
        const auto family = seed == 1   ? ActivationKind::Tag::Gaussian
                            : seed == 2 ? ActivationKind::Tag::Sine
                                        : ActivationKind::Tag::Relu;
        ArchSpec spec = cmlp::testing::random_arch(rng, family);
        spec.hidden_widths = {8, 8};
        Network net = init_network(spec, rng);

        Matrix coords(spec.input_dim, 6), targets(1, 6);
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = rng.uniform(-1.0, 1.0);

        RegConfig cfg;
        cfg.epsilon = 0.05;
        cfg.n_pairs = 8;
        const std::uint64_t pair_seed = 1234;

        RandomSource graph_rng(pair_seed);
        LossGraph g = build_loss_graph(net, coords, targets, cfg, graph_rng);
        g.tape.backward(g.total);
        std::vector<std::vector<double>> analytic;
        for (auto id : g.param_nodes) {
            const Matrix& gm = g.tape.grad(id);
            analytic.emplace_back(gm.data().begin(), gm.data().end());
        }
        const double rel = cmlp::testing::max_grad_rel_error(net, coords, targets, cfg,
                                                             pair_seed, analytic, 1e-6);
        CHECK(rel < 1e-4);
    }
}

TEST_CASE("RegConfig validation") {
    RegConfig cfg;
    cfg.xi_stddevs = {0.2};  // above the 0.1 cap
    CHECK_THROWS_AS(cfg.validate(1), std::invalid_argument);
    cfg.xi_stddevs = {0.05, 0.05, 0.05};
    CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
    cfg.xi_stddevs = {0.05};
    CHECK_NOTHROW(cfg.validate(2));
}
