#include "cmlp/network.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace cmlp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr char kMagic[8] = {'C', 'M', 'L', 'P', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<double> rff_embed(const RffEmbedding& emb, std::span<const double> x) {
    if (x.size() != emb.L.rows())
        throw std::invalid_argument("rff_embed: coordinate dimension mismatch");
    std::vector<double> out(2 * emb.D);
    for (std::size_t j = 0; j < emb.D; ++j) {
        double lj_x = 0.0;
        for (std::size_t i = 0; i < emb.L.rows(); ++i) lj_x += emb.L(i, j) * x[i];
        out[2 * j] = std::sin(lj_x);
        out[2 * j + 1] = std::cos(lj_x);
    }
    return out;
}

Matrix rff_embed_batch(const RffEmbedding& emb, const Matrix& X) {
    if (X.rows() != emb.L.rows())
        throw std::invalid_argument("rff_embed_batch: coordinate dimension mismatch");
    const std::size_t B = X.cols();
    Matrix out(2 * emb.D, B);
    for (std::size_t j = 0; j < emb.D; ++j) {
        for (std::size_t col = 0; col < B; ++col) {
            double lj_x = 0.0;
            for (std::size_t i = 0; i < X.rows(); ++i) lj_x += emb.L(i, j) * X(i, col);
            out(2 * j, col) = std::sin(lj_x);
            out(2 * j + 1, col) = std::cos(lj_x);
        }
    }
    return out;
}

std::size_t Network::penultimate_dim() const {
    if (!hidden.empty()) return hidden.back().W.rows();
    if (rff) return rff->out_dim();
    return input_dim;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for_each_param([&n](const Matrix& m) { n += m.size(); });
    return n;
}

void Network::for_each_param(const std::function<void(Matrix&)>& fn) {
    for (Layer& l : hidden) {
        fn(l.W);
        fn(l.b);
    }
    fn(w_out);
    fn(b_out);
}

void Network::for_each_param(const std::function<void(const Matrix&)>& fn) const {
    for (const Layer& l : hidden) {
        fn(l.W);
        fn(l.b);
    }
    fn(w_out);
    fn(b_out);
}

namespace {

void fill_uniform(Matrix& m, RandomSource& rng, double bound) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-bound, bound);
}

void fill_normal(Matrix& m, RandomSource& rng, double stddev) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = stddev * rng.normal();
}

void init_layer(Layer& l, std::size_t fan_in, bool first, const ActivationKind& act,
                RandomSource& rng) {
    switch (act.tag) {
        case ActivationKind::Tag::Sine: {
            // First layer keeps the full bound so the effective frequencies
            // 2*pi*a*W span the band set by a; deeper layers divide by
            // 2*pi*a to keep preactivations in the activation's useful range.
            const double base = std::sqrt(6.0 / static_cast<double>(fan_in));
            const double bound = first ? base : base / (kTwoPi * act.param);
            fill_uniform(l.W, rng, bound);
            fill_uniform(l.b, rng, bound);
            break;
        }
        case ActivationKind::Tag::Gaussian: {
            const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
            fill_uniform(l.W, rng, bound);
            fill_uniform(l.b, rng, bound);
            break;
        }
        case ActivationKind::Tag::Relu: {
            fill_normal(l.W, rng, std::sqrt(2.0 / static_cast<double>(fan_in)));
            l.b.fill(0.0);
            break;
        }
    }
}

}  // namespace

Network init_network(const ArchSpec& spec, RandomSource& rng) {
    if (spec.input_dim == 0 || spec.output_dim == 0)
        throw std::invalid_argument("init_network: dims must be positive");
    for (std::size_t w : spec.hidden_widths)
        if (w == 0) throw std::invalid_argument("init_network: zero hidden width");
    if (spec.use_rff && (spec.rff_D == 0 || !(spec.rff_sigma > 0.0)))
        throw std::invalid_argument("init_network: invalid RFF parameters");

    Network net;
    net.input_dim = spec.input_dim;
    net.output_dim = spec.output_dim;

    std::size_t in = spec.input_dim;
    if (spec.use_rff) {
        RffEmbedding emb;
        emb.D = spec.rff_D;
        emb.sigma_embed = spec.rff_sigma;
        emb.L = Matrix(spec.input_dim, spec.rff_D);
        fill_normal(emb.L, rng, kTwoPi * spec.rff_sigma);
        in = emb.out_dim();
        net.rff = std::move(emb);
    }

    bool first = true;
    for (std::size_t width : spec.hidden_widths) {
        Layer l;
        l.W = Matrix(width, in);
        l.b = Matrix(width, 1);
        l.act = spec.activation;
        init_layer(l, in, first, spec.activation, rng);
        net.hidden.push_back(std::move(l));
        in = width;
        first = false;
    }

    net.w_out = Matrix(spec.output_dim, in);
    net.b_out = Matrix(spec.output_dim, 1);
    fill_uniform(net.w_out, rng, std::sqrt(1.0 / static_cast<double>(in)));
    net.b_out.fill(0.0);
    return net;
}

namespace {

void check_finite(const Matrix& m, std::size_t layer_index) {
    if (!m.all_finite())
        throw std::runtime_error("forward: non-finite value at layer " +
                                 std::to_string(layer_index));
}

}  // namespace

Matrix forward_batch(const Network& net, const Matrix& X, Matrix* penultimate) {
    if (X.rows() != net.input_dim)
        throw std::invalid_argument("forward: coordinate dimension mismatch");
    Matrix h = net.rff ? rff_embed_batch(*net.rff, X) : X;
    std::size_t layer_index = 0;
    for (const Layer& l : net.hidden) {
        Matrix z = matmul(l.W, h);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            const double bi = l.b(i, 0);
            for (std::size_t j = 0; j < z.cols(); ++j) {
                z(i, j) = l.act.apply(z(i, j) + bi);
            }
        }
        check_finite(z, layer_index);
        h = std::move(z);
        ++layer_index;
    }
    if (penultimate) *penultimate = h;
    Matrix out = matmul(net.w_out, h);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        const double bi = net.b_out(i, 0);
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bi;
    }
    check_finite(out, layer_index);
    return out;
}

std::vector<double> forward(const Network& net, std::span<const double> x,
                            std::vector<double>* penultimate) {
    Matrix X(net.input_dim, 1, std::vector<double>(x.begin(), x.end()));
    Matrix pen;
    Matrix out = forward_batch(net, X, penultimate ? &pen : nullptr);
    if (penultimate)
        penultimate->assign(pen.data().begin(), pen.data().end());
    return std::vector<double>(out.data().begin(), out.data().end());
}

ShallowView shallow_of(const Network& net) {
    if (net.rff)
        throw std::invalid_argument("shallow_of: embedded networks have no shallow view");
    if (net.hidden.size() != 1)
        throw std::invalid_argument("shallow_of: network must have exactly one hidden layer");
    if (net.output_dim != 1)
        throw std::invalid_argument("shallow_of: output must be scalar");
    ShallowView v;
    v.w1 = net.hidden[0].W;
    v.w2.resize(net.w_out.cols());
    for (std::size_t i = 0; i < net.w_out.cols(); ++i) v.w2[i] = net.w_out(0, i);
    v.act = net.hidden[0].act;
    v.input_dim = net.input_dim;
    v.neurons = v.w1.rows();
    return v;
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_matrix(std::ostream& os, const Matrix& m) {
    write_u32(os, static_cast<std::uint32_t>(m.rows()));
    write_u32(os, static_cast<std::uint32_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data().data()),
             static_cast<std::streamsize>(m.size() * sizeof(double)));
}
std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
double read_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
Matrix read_matrix(std::istream& is) {
    const std::uint32_t r = read_u32(is);
    const std::uint32_t c = read_u32(is);
    Matrix m(r, c);
    is.read(reinterpret_cast<char*>(m.data().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    return m;
}

}  // namespace

void save_network(const Network& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_network: cannot open " + path);
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(net.input_dim));
    write_u32(os, static_cast<std::uint32_t>(net.output_dim));
    write_u32(os, net.rff ? 1u : 0u);
    if (net.rff) {
        write_u32(os, static_cast<std::uint32_t>(net.rff->D));
        write_f64(os, net.rff->sigma_embed);
        write_matrix(os, net.rff->L);
    }
    write_u32(os, static_cast<std::uint32_t>(net.hidden.size()));
    for (const Layer& l : net.hidden) {
        write_u32(os, static_cast<std::uint32_t>(l.act.tag));
        write_f64(os, l.act.param);
        write_matrix(os, l.W);
        write_matrix(os, l.b);
    }
    write_matrix(os, net.w_out);
    write_matrix(os, net.b_out);
    if (!os) throw std::runtime_error("save_network: write failed for " + path);
}

Network load_network(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_network: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_network: bad magic in " + path);
    if (read_u32(is) != kVersion)
        throw std::runtime_error("load_network: unsupported version in " + path);
    Network net;
    net.input_dim = read_u32(is);
    net.output_dim = read_u32(is);
    if (read_u32(is)) {
        RffEmbedding emb;
        emb.D = read_u32(is);
        emb.sigma_embed = read_f64(is);
        emb.L = read_matrix(is);
        net.rff = std::move(emb);
    }
    const std::uint32_t n_hidden = read_u32(is);
    for (std::uint32_t i = 0; i < n_hidden; ++i) {
        Layer l;
        l.act.tag = static_cast<ActivationKind::Tag>(read_u32(is));
        l.act.param = read_f64(is);
        l.W = read_matrix(is);
        l.b = read_matrix(is);
        net.hidden.push_back(std::move(l));
    }
    net.w_out = read_matrix(is);
    net.b_out = read_matrix(is);
    if (!is) throw std::runtime_error("load_network: truncated file " + path);
    return net;
}

}  // namespace cmlp
