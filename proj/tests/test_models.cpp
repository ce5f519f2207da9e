#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "cmlp/network.hpp"
#include "helpers.hpp"

using namespace cmlp;

namespace {
constexpr double kPi = std::numbers::pi;

RffEmbedding make_embedding(Matrix L, double sigma) {
    RffEmbedding emb;
    emb.D = L.cols();
    emb.sigma_embed = sigma;
    emb.L = std::move(L);
    return emb;
}
}  // namespace

TEST_CASE("rff_embed zero phase gives [0, 1] pairs") {
    const auto emb = make_embedding(Matrix(2, 3), 1.0);  // all l_j = 0
    const auto e = rff_embed(emb, std::vector<double>{0.3, -0.7});
    REQUIRE(e.size() == 6);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(e[2 * j] == doctest::Approx(0.0));
        CHECK(e[2 * j + 1] == doctest::Approx(1.0));
    }
}

TEST_CASE("rff_embed analytic value at pi/2") {
    const auto emb = make_embedding(Matrix(1, 1, {kPi / 2.0}), 1.0);
    const auto e = rff_embed(emb, std::vector<double>{1.0});
    CHECK(std::abs(e[0] - 1.0) < 1e-12);
    CHECK(std::abs(e[1] - 0.0) < 1e-12);
}

TEST_CASE("rff_embed components bounded and norm is sqrt(D)") {
    RandomSource rng(3);
    Matrix L(2, 8);
    for (std::size_t i = 0; i < L.size(); ++i) L[i] = 3.0 * rng.normal();
    const auto emb = make_embedding(std::move(L), 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto e = rff_embed(emb, x);
        double norm2 = 0.0;
        for (double v : e) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
            norm2 += v * v;
        }
        CHECK(std::sqrt(norm2) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    }
}

TEST_CASE("rff_embed rejects wrong dimension") {
    const auto emb = make_embedding(Matrix(2, 3), 1.0);
    CHECK_THROWS_AS((void)rff_embed(emb, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("forward: gaussian activation is 1 at zero preactivation") {
    ArchSpec spec;
    spec.input_dim = 1;
    spec.hidden_widths = {4};
    spec.activation = ActivationKind::gaussian(0.5);
    RandomSource rng(1);
    Network net = init_network(spec, rng);
    net.hidden[0].W.fill(0.0);
    net.hidden[0].b.fill(0.0);
    net.w_out.fill(1.0);
    net.b_out.fill(0.0);
    const auto y = forward(net, std::vector<double>{0.25});
    CHECK(y[0] == doctest::Approx(4.0));  // four neurons, each exp(0) = 1
}

TEST_CASE("forward: sine activation analytic point") {
    // sin(2*pi*a*z) with a = 1, z = 0.25 -> sin(pi/2) = 1.
    ArchSpec spec;
    spec.input_dim = 1;
    spec.hidden_widths = {1};
    spec.activation = ActivationKind::sine(1.0);
    RandomSource rng(1);
    Network net = init_network(spec, rng);
    net.hidden[0].W(0, 0) = 0.25;
    net.hidden[0].b(0, 0) = 0.0;
    net.w_out(0, 0) = 1.0;
    net.b_out(0, 0) = 0.0;
    const auto y = forward(net, std::vector<double>{1.0});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward: zero weights yield the final bias") {
    ArchSpec spec;
    spec.input_dim = 2;
    spec.hidden_widths = {8, 8};
    spec.activation = ActivationKind::relu();
    RandomSource rng(5);
    Network net = init_network(spec, rng);
    for (auto& l : net.hidden) {
        l.W.fill(0.0);
        l.b.fill(0.0);
    }
    net.w_out.fill(0.0);
    net.b_out(0, 0) = 0.625;
    const auto y = forward(net, std::vector<double>{0.4, -0.9});
    CHECK(y[0] == 0.625);
}

TEST_CASE("init_network is bitwise deterministic under a fixed seed") {
    for (auto family : {ActivationKind::Tag::Gaussian, ActivationKind::Tag::Sine,
                        ActivationKind::Tag::Relu}) {
        RandomSource spec_rng(17);
        const ArchSpec spec = cmlp::testing::random_arch(spec_rng, family);
        RandomSource r1(99), r2(99);
        const Network a = init_network(spec, r1);
        const Network b = init_network(spec, r2);
        bool equal = true;
        std::vector<const Matrix*> pa, pb;
        a.for_each_param([&](const Matrix& m) { pa.push_back(&m); });
        b.for_each_param([&](const Matrix& m) { pb.push_back(&m); });
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t k = 0; k < pa[i]->size(); ++k)
                equal = equal && (*pa[i])[k] == (*pb[i])[k];
        if (a.rff)
            for (std::size_t k = 0; k < a.rff->L.size(); ++k)
                equal = equal && a.rff->L[k] == b.rff->L[k];
        CHECK(equal);
    }
}

TEST_CASE("init_network: sine first layer within the stated uniform bound") {
    ArchSpec spec;
    spec.input_dim = 64;
    spec.hidden_widths = {32, 32};
    spec.activation = ActivationKind::sine(3.0);
    RandomSource rng(4);
    const Network net = init_network(spec, rng);
    const double bound = std::sqrt(6.0 / 64.0);
    for (std::size_t i = 0; i < net.hidden[0].W.size(); ++i) {
        CHECK(net.hidden[0].W[i] <= bound);
        CHECK(net.hidden[0].W[i] >= -bound);
    }
    // Deeper sine layers are narrowed by 2*pi*a.
    const double deep_bound = std::sqrt(6.0 / 32.0) / (2.0 * kPi * 3.0);
    for (std::size_t i = 0; i < net.hidden[1].W.size(); ++i)
        CHECK(std::abs(net.hidden[1].W[i]) <= deep_bound);
}

TEST_CASE("init_network: RFF matrix stddev within 5% of 2*pi*sigma") {
    ArchSpec spec;
    spec.input_dim = 2;
    spec.hidden_widths = {8};
    spec.activation = ActivationKind::relu();
    spec.use_rff = true;
    spec.rff_D = 256;
    spec.rff_sigma = 1.0;
    RandomSource rng(21);
    const Network net = init_network(spec, rng);
    REQUIRE(net.rff.has_value());
    double ss = 0.0;
    for (std::size_t i = 0; i < net.rff->L.size(); ++i) ss += net.rff->L[i] * net.rff->L[i];
    const double stddev = std::sqrt(ss / static_cast<double>(net.rff->L.size()));
    CHECK(stddev == doctest::Approx(2.0 * kPi).epsilon(0.05));
}

TEST_CASE("init_network rejects invalid specs") {
    RandomSource rng(1);
    ArchSpec bad;
    bad.input_dim = 0;
    CHECK_THROWS_AS((void)init_network(bad, rng), std::invalid_argument);
    ArchSpec bad2;
    bad2.hidden_widths = {8, 0};
    CHECK_THROWS_AS((void)init_network(bad2, rng), std::invalid_argument);
    ArchSpec bad3;
    bad3.use_rff = true;
    bad3.rff_D = 0;
    CHECK_THROWS_AS((void)init_network(bad3, rng), std::invalid_argument);
}

TEST_CASE("shallow_of: view and contract errors") {
    RandomSource rng(2);
    ArchSpec spec;
    spec.input_dim = 2;
    spec.hidden_widths = {5};
    spec.activation = ActivationKind::gaussian(0.5);
    const Network net = init_network(spec, rng);
    const ShallowView v = shallow_of(net);
    CHECK(v.neurons == 5);
    CHECK(v.w1.rows() == 5);
    CHECK(v.w1.cols() == 2);

    ArchSpec deep = spec;
    deep.hidden_widths = {5, 5};
    const Network dnet = init_network(deep, rng);
    CHECK_THROWS_AS((void)shallow_of(dnet), std::invalid_argument);
}

TEST_CASE("shallow view parameters round-trip to identical forward outputs") {
    RandomSource rng(31);
    ArchSpec spec;
    spec.input_dim = 2;
    spec.hidden_widths = {4};
    spec.activation = ActivationKind::sine(1.5);
    Network net = init_network(spec, rng);
    net.hidden[0].b.fill(0.0);  // the view drops biases
    net.b_out.fill(0.0);
    const ShallowView v = shallow_of(net);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double direct = forward(net, x)[0];
        double recon = 0.0;
        for (std::size_t i = 0; i < v.neurons; ++i) {
            double z = 0.0;
            for (std::size_t j = 0; j < 2; ++j) z += v.w1(i, j) * x[j];
            recon += v.w2[i] * v.act.apply(z);
        }
        CHECK(direct == doctest::Approx(recon).epsilon(1e-12));
    }
}

TEST_CASE("property: forward finite and activation ranges hold") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        RandomSource rng(seed);
        const auto family = seed % 3 == 0   ? ActivationKind::Tag::Relu
                            : seed % 3 == 1 ? ActivationKind::Tag::Gaussian
                                            : ActivationKind::Tag::Sine;
        const ArchSpec spec = cmlp::testing::random_arch(rng, family);
        const Network net = init_network(spec, rng);
        Matrix X(spec.input_dim, 32);
        for (std::size_t i = 0; i < X.size(); ++i) X[i] = rng.uniform(-1.0, 1.0);
        Matrix pen;
        const Matrix out = forward_batch(net, X, &pen);
        CHECK(out.all_finite());
        if (family == ActivationKind::Tag::Gaussian) {
            for (std::size_t i = 0; i < pen.size(); ++i) {
                CHECK(pen[i] > 0.0);
                CHECK(pen[i] <= 1.0);
            }
        } else if (family == ActivationKind::Tag::Sine) {
            for (std::size_t i = 0; i < pen.size(); ++i) {
                CHECK(pen[i] >= -1.0);
                CHECK(pen[i] <= 1.0);
            }
        }
    }
}

TEST_CASE("activation derivatives match finite differences") {
    RandomSource rng(8);
    for (const auto& act : {ActivationKind::gaussian(0.4), ActivationKind::sine(1.3),
                            ActivationKind::relu()}) {
        for (int i = 0; i < 50; ++i) {
            double z = rng.uniform(-2.0, 2.0);
            if (act.tag == ActivationKind::Tag::Relu && std::abs(z) < 1e-3) z += 0.01;
            const double h = 1e-6;
            const double fd = (act.apply(z + h) - act.apply(z - h)) / (2.0 * h);
            CHECK(act.derivative(z) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    RandomSource rng(77);
    ArchSpec spec = cmlp::testing::random_arch(rng, ActivationKind::Tag::Relu);
    const Network net = init_network(spec, rng);
    const std::string path = "checkpoint_roundtrip.bin";
    save_network(net, path);
    const Network back = load_network(path);

    CHECK(back.input_dim == net.input_dim);
    CHECK(back.output_dim == net.output_dim);
    REQUIRE(back.rff.has_value());
    CHECK(back.rff->sigma_embed == net.rff->sigma_embed);
    for (std::size_t i = 0; i < net.rff->L.size(); ++i)
        CHECK(back.rff->L[i] == net.rff->L[i]);
    std::vector<const Matrix*> pa, pb;
    net.for_each_param([&](const Matrix& m) { pa.push_back(&m); });
    back.for_each_param([&](const Matrix& m) { pb.push_back(&m); });
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        REQUIRE(pa[i]->size() == pb[i]->size());
        for (std::size_t k = 0; k < pa[i]->size(); ++k) CHECK((*pa[i])[k] == (*pb[i])[k]);
    }

    // Same bytes when saved again.
    const std::string path2 = "checkpoint_roundtrip2.bin";
    save_network(back, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("load_network rejects bad magic") {
    const std::string path = "bad_checkpoint.bin";
    std::ofstream(path) << "not a checkpoint";
    CHECK_THROWS_AS((void)load_network(path), std::runtime_error);
    std::remove(path.c_str());
}
