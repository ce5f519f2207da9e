#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cmlp/activation.hpp"
#include "cmlp/matrix.hpp"
#include "cmlp/random.hpp"

namespace cmlp {

// Random Fourier feature embedding x -> [sin(l_j . x), cos(l_j . x)]_j,
// interleaved per frequency vector. L has n rows and D columns; the output
// dimension is exactly 2D.
struct RffEmbedding {
    Matrix L;             // n x D, columns are the frequency vectors l_j
    std::size_t D = 0;
    double sigma_embed = 0.0;  // the stddev/(2*pi) that generated L

    std::size_t out_dim() const { return 2 * D; }
};

// Embed a single coordinate (size n) into R^{2D}.
std::vector<double> rff_embed(const RffEmbedding& emb, std::span<const double> x);
// Embed a batch; X is n x B, result is 2D x B.
Matrix rff_embed_batch(const RffEmbedding& emb, const Matrix& X);

struct Layer {
    Matrix W;          // out x in
    Matrix b;          // out x 1
    ActivationKind act;
};

// Feed-forward coordinate network: optional RFF embedding, hidden layers with
// a pointwise activation, and a final affine layer with no activation.
struct Network {
    std::optional<RffEmbedding> rff;
    std::vector<Layer> hidden;
    Matrix w_out;      // m_out x last_width
    Matrix b_out;      // m_out x 1
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;

    std::size_t depth() const { return hidden.size(); }
    // Width of the features feeding the final affine layer.
    std::size_t penultimate_dim() const;
    std::size_t parameter_count() const;
    // Visits every trainable matrix in a fixed order (hidden W,b pairs then
    // the output pair). The RFF matrix is frozen and not visited.
    void for_each_param(const std::function<void(Matrix&)>& fn);
    void for_each_param(const std::function<void(const Matrix&)>& fn) const;
};

// Architecture description consumed by init_network.
struct ArchSpec {
    std::size_t input_dim = 1;
    std::size_t output_dim = 1;
    std::vector<std::size_t> hidden_widths;
    ActivationKind activation = ActivationKind::relu();
    bool use_rff = false;
    std::size_t rff_D = 0;
    double rff_sigma = 1.0;
};

// Deterministic initialization under a fixed seed.
//   Sine:     first layer U(+-sqrt(6/fan_in)) widened relative to the deeper
//             layers, which use U(+-sqrt(6/fan_in)/(2*pi*a));
//   Gaussian: U(+-sqrt(1/fan_in));
//   ReLU:     N(0, sqrt(2/fan_in)), zero bias;
//   RFF L:    i.i.d. N(0, 2*pi*sigma).
Network init_network(const ArchSpec& spec, RandomSource& rng);

// Evaluate at one coordinate. If `penultimate` is non-null it receives the
// input of the final affine layer. Throws std::runtime_error naming the
// layer index if an intermediate value is non-finite.
std::vector<double> forward(const Network& net, std::span<const double> x,
                            std::vector<double>* penultimate = nullptr);

// Batched evaluation; X is n x B. If `penultimate` is non-null it receives
// the (width x B) features entering the final affine layer.
Matrix forward_batch(const Network& net, const Matrix& X, Matrix* penultimate = nullptr);

// Parameters of a single-hidden-layer scalar-output network in the form the
// closed-form spectrum needs. Row i of `w1` feeds hidden neuron i.
struct ShallowView {
    Matrix w1;                  // m x n
    std::vector<double> w2;     // m
    ActivationKind act;
    std::size_t input_dim = 0;
    std::size_t neurons = 0;
};

// Requires exactly one hidden layer, scalar output and no embedding;
// otherwise throws std::invalid_argument.
ShallowView shallow_of(const Network& net);

// Checkpoint I/O. Flat little-endian binary with a magic header; round-trips
// bit-exactly.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace cmlp
