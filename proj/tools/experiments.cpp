#include <map>
#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cmlp/analytic_spectrum.hpp"
#include "cmlp/io.hpp"
#include "cmlp/spectrum.hpp"
#include "cmlp/train.hpp"

namespace cmlp::exp {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_out_dir(const RunContext& ctx) { fs::create_directories(ctx.out_dir); }

}  // namespace

Network toy_gaussian_network(const std::vector<double>& scale_w, double sigma) {
    ArchSpec spec;
    spec.input_dim = 2;
    spec.hidden_widths = {2};
    spec.activation = ActivationKind::gaussian(sigma);
    RandomSource rng(1);
    Network net = init_network(spec, rng);
    const double base[2][2] = {{ToySetup::w0[0], ToySetup::w0[1]},
                               {ToySetup::w1[0], ToySetup::w1[1]}};
    const double w2[2] = {ToySetup::out0, ToySetup::out1};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j)
            net.hidden[0].W(i, j) = scale_w[i] * base[i][j];
        net.hidden[0].b(i, 0) = 0.0;
        net.w_out(0, i) = w2[i];
    }
    net.b_out(0, 0) = 0.0;
    return net;
}

GridSignal synth_image(std::uint64_t seed, std::size_t resolution) {
    RandomSource rng(seed);
    GridSignal img;
    img.dims = 2;
    img.nx = resolution;
    img.ny = resolution;
    img.values.assign(resolution * resolution, 0.0);

    // Octave gratings with 1/f amplitudes give the broad natural-image
    // spectrum; a few smooth bumps add flat regions.
    struct Grating {
        double fx, fy, phase, amp;
    };
    std::vector<Grating> gratings;
    double freq = 1.0;
    for (int octave = 0; octave < 5; ++octave) {
        const int per_octave = 2;
        for (int g = 0; g < per_octave; ++g) {
            const double theta = rng.uniform(0.0, kPi);
            gratings.push_back({freq * std::cos(theta), freq * std::sin(theta),
                                rng.uniform(0.0, 2.0 * kPi), 1.0 / freq});
        }
        freq *= 2.0;
    }
    struct Bump {
        double cx, cy, w, amp;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < 3; ++b)
        bumps.push_back({rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7),
                         rng.uniform(0.25, 0.5), rng.uniform(-1.0, 1.0)});

    double lo = 1e300, hi = -1e300;
    for (std::size_t iy = 0; iy < resolution; ++iy) {
        const double y = -1.0 + 2.0 * static_cast<double>(iy) / static_cast<double>(resolution);
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            const double x =
                -1.0 + 2.0 * static_cast<double>(ix) / static_cast<double>(resolution);
            double v = 0.0;
            for (const auto& g : gratings)
                v += g.amp * std::sin(2.0 * kPi * (g.fx * x + g.fy * y) + g.phase);
            for (const auto& b : bumps) {
                const double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
                v += b.amp * std::exp(-d2 / (2.0 * b.w * b.w));
            }
            img.values[iy * resolution + ix] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : img.values) v = (v - lo) / span;
    return img;
}

const std::vector<ArchSetting>& arch_settings() {
    static const std::vector<ArchSetting> settings = {
        {"gaussian", 0.5, 0.05},
        {"sine", 1.0, 10.0},
        {"rff", 1.0, 10.0},
    };
    return settings;
}

ArchSpec make_arch(const std::string& family, double hyper, std::size_t input_dim,
                   std::size_t depth, std::size_t width) {
    ArchSpec spec;
    spec.input_dim = input_dim;
    spec.output_dim = 1;
    spec.hidden_widths.assign(depth, width);
    if (family == "gaussian") {
        spec.activation = ActivationKind::gaussian(hyper);
    } else if (family == "sine") {
        spec.activation = ActivationKind::sine(hyper);
    } else if (family == "rff") {
        spec.activation = ActivationKind::relu();
        spec.use_rff = true;
        spec.rff_D = width / 2;
        spec.rff_sigma = hyper;
    } else {
        throw std::invalid_argument("unknown architecture family: " + family);
    }
    return spec;
}

void write_manifest(const RunContext& ctx, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = ctx.section;
    j["seed"] = ctx.seed;
    j["out_dir"] = ctx.out_dir;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : ctx.config.section_items(ctx.section)) cfg[k] = v;
    j["config"] = cfg;
    j["outputs"] = outputs;
    std::ofstream os(path_join(ctx.out_dir, "manifest.json"));
    os << j.dump(2) << '\n';
}

namespace {

// Closed-form low/high energy split of a set of line spectra. Gaussian
// envelopes integrate to erf terms; delta pairs count point masses.
struct EnergySplit {
    double low = 0.0;
    double high = 0.0;
    double low_fraction() const { return low + high > 0.0 ? low / (low + high) : 1.0; }
    double high_fraction() const { return low + high > 0.0 ? high / (low + high) : 0.0; }
};

EnergySplit analytic_energy_split(const std::vector<LineSpectrum>& spectra, double cutoff) {
    EnergySplit split;
    for (const auto& ls : spectra) {
        if (ls.is_delta()) {
            const auto& d = std::get<DeltaPair>(ls.envelope);
            const double e = d.mass * d.mass;
            (d.location < cutoff ? split.low : split.high) += 2.0 * e;
        } else {
            const auto& g = std::get<GaussianEnvelope>(ls.envelope);
            // integral over (0, b) of A^2 exp(-2 (k/w)^2) dk
            const double full = g.amplitude * g.amplitude * g.width *
                                std::sqrt(kPi / 8.0);
            const double below = full * std::erf(std::sqrt(2.0) * cutoff / g.width);
            split.low += below;
            split.high += full - below;
        }
    }
    return split;
}

struct CsvWriter {
    std::ofstream os;
    explicit CsvWriter(const std::string& path) : os(path) {
        if (!os) throw std::runtime_error("cannot open " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }
};

}  // namespace

ExperimentReport run_toy_spectrum(const RunContext& ctx) {
    ensure_out_dir(ctx);
    std::vector<std::string> outputs;
    ExperimentReport report;

    const std::vector<double> sigma_sweep =
        parse_list(ctx.get("sigma_sweep", "0.5,0.3,0.15,0.05"));
    const double small_scale = ctx.get_double("small_scale", 0.03);
    const double tuned_low = ctx.get_double("tuned_low_scale", 0.03);
    const double tuned_high = ctx.get_double("tuned_high_scale", 0.5);
    const double cutoff = ctx.get_double("cutoff", ToySetup::cutoff);
    const std::size_t res = ctx.get_size("resolution", 256);

    CsvWriter summary(path_join(ctx.out_dir, "summary.csv"));
    summary.row({"panel", "sigma", "scale0", "scale1", "low_fraction", "high_fraction"});

    auto emit_panel = [&](const std::string& tag, const Network& net, double sigma,
                          double s0, double s1) -> EnergySplit {
        const auto spectra = shallow_spectrum(shallow_of(net));
        const EnergySplit split = analytic_energy_split(spectra, cutoff);
        save_line_spectra_csv(spectra, 64.0, 512,
                              path_join(ctx.out_dir, "lines_" + tag + ".csv"));
        outputs.push_back("lines_" + tag + ".csv");
        const SpectrumGrid spec = dft(mean_subtracted(sample_grid(net, res)), true);
        save_image(spectrum_heatmap(spec), path_join(ctx.out_dir, "dft_" + tag + ".pgm"));
        outputs.push_back("dft_" + tag + ".pgm");
        summary.row({tag, fmt(sigma), fmt(s0), fmt(s1), fmt(split.low_fraction()),
                     fmt(split.high_fraction())});
        return split;
    };

    // Panel 1: fixed weights, shrinking sigma.
    std::vector<double> p1_low;
    for (std::size_t i = 0; i < sigma_sweep.size(); ++i) {
        const double sigma = sigma_sweep[i];
        const Network net = toy_gaussian_network({1.0, 1.0}, sigma);
        p1_low.push_back(
            emit_panel("p1_s" + fmt6(sigma), net, sigma, 1.0, 1.0).low_fraction());
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < p1_low.size(); ++i)
        decreasing = decreasing && p1_low[i] < p1_low[i - 1];
    report.checks.push_back({"panel1_low_fraction_decreases_with_sigma", decreasing,
                             p1_low.front(), p1_low.back()});

    // Panel 2: small weights at the smallest sigma remove the high band.
    const double sigma_min = sigma_sweep.back();
    const Network small = toy_gaussian_network({small_scale, small_scale}, sigma_min);
    const EnergySplit p2 =
        emit_panel("p2_small_w", small, sigma_min, small_scale, small_scale);
    report.checks.push_back({"panel2_high_band_removed", p2.high_fraction() < 0.05,
                             p2.high_fraction(), 0.05});

    // Panel 3: one small and one large weight preserve both bands.
    const Network tuned = toy_gaussian_network({tuned_low, tuned_high}, sigma_min);
    const EnergySplit p3 = emit_panel("p3_tuned", tuned, sigma_min, tuned_low, tuned_high);
    report.checks.push_back({"panel3_low_above_panel1", p3.low_fraction() > p1_low.back(),
                             p3.low_fraction(), p1_low.back()});
    report.checks.push_back({"panel3_high_above_panel2",
                             p3.high_fraction() > p2.high_fraction(), p3.high_fraction(),
                             p2.high_fraction()});

    outputs.push_back("summary.csv");
    write_manifest(ctx, outputs);
    return report;
}

namespace {

struct TrainedCell {
    std::string name;
    TrainResult result;
};

TrainedCell train_cell(const RunContext& ctx, const std::string& name,
                       const SignalDataset& ds, const TrainConfig& cfg,
                       std::vector<std::string>& outputs) {
    TrainedCell cell{name, train(ds, cfg)};
    const std::string ckpt = "net_" + name + ".ckpt";
    save_network(cell.result.net, path_join(ctx.out_dir, ckpt));
    outputs.push_back(ckpt);
    return cell;
}

// Regional MSEs on the full grid (left = region 0).
struct RegionalMse {
    double left = 0.0, right = 0.0, total = 0.0;
};

RegionalMse regional_mse(const Network& net, const SignalDataset& ds, bool clamp01) {
    std::vector<double> pred = predict(net, ds);
    if (clamp01)
        for (double& v : pred) v = std::clamp(v, 0.0, 1.0);
    RegionalMse m;
    std::size_t nl = 0, nr = 0;
    for (std::size_t i = 0; i < ds.count(); ++i) {
        const double d = pred[i] - ds.targets[i];
        m.total += d * d;
        if (ds.region[i] == 0) {
            m.left += d * d;
            ++nl;
        } else {
            m.right += d * d;
            ++nr;
        }
    }
    m.total /= static_cast<double>(ds.count());
    if (nl) m.left /= static_cast<double>(nl);
    if (nr) m.right /= static_cast<double>(nr);
    return m;
}

}  // namespace

ExperimentReport run_wave(const RunContext& ctx) {
    ensure_out_dir(ctx);
    std::vector<std::string> outputs;
    ExperimentReport report;

    const std::size_t samples = ctx.get_size("samples", 512);
    const double rate = ctx.get_double("rate", 0.33);
    const double split = ctx.get_double("split", 0.5);
    const std::vector<double> low = parse_list(ctx.get("low_freqs", "1.5,3"));
    const std::vector<double> high = parse_list(ctx.get("high_freqs", "10,14"));

    GridSignal wave;
    const std::string wav_path = ctx.get("wav", "");
    if (!wav_path.empty()) {
        auto s = load_wav(wav_path);
        if (s.size() > samples) s.resize(samples);
        wave = wave_signal(std::move(s));
    } else {
        wave = synth_multiband_wave(samples, low, high, split);
    }
    RandomSource ds_rng(RandomSource::derive_seed(ctx.seed, 0));
    const SignalDataset ds = make_sparse_dataset(wave, rate, ds_rng, split);
    save_dataset_csv(ds, path_join(ctx.out_dir, "dataset.csv"));
    outputs.push_back("dataset.csv");

    TrainConfig base;
    base.arch.input_dim = 1;
    base.lr = ctx.get_double("lr", 1e-3);
    base.steps = ctx.get_size("steps", 4000);
    const std::size_t depth = ctx.get_size("depth", 4);
    const std::size_t width = ctx.get_size("width", 128);
    const double a_down = ctx.get_double("a_down", 1.0);
    const double a_up = ctx.get_double("a_up", 10.0);
    const double eps = ctx.get_double("eps", 2e-3);
    const double xi = ctx.get_double("xi", 0.01);
    const std::size_t n_pairs = ctx.get_size("n_pairs", 0);

    struct Setting {
        std::string name;
        double a;
        double eps;
    };
    const std::vector<Setting> settings = {
        {"kdown", a_down, 0.0}, {"kup", a_up, 0.0}, {"reg", a_up, eps}};

    CsvWriter table(path_join(ctx.out_dir, "metrics.csv"));
    table.row({"setting", "a", "eps", "l_psnr", "r_psnr", "t_psnr", "mse_low_region",
               "mse_high_region"});

    std::map<std::string, RegionalMse> mses;
    std::map<std::string, Metrics> mets;
    std::size_t cell = 1;
    for (const auto& s : settings) {
        TrainConfig cfg = base;
        cfg.arch = make_arch("sine", s.a, 1, depth, width);
        cfg.seed = RandomSource::derive_seed(ctx.seed, cell++);
        cfg.reg.epsilon = s.eps;
        cfg.reg.xi_stddevs = {xi};
        cfg.reg.n_pairs = n_pairs;
        const TrainedCell run = train_cell(ctx, s.name, ds, cfg, outputs);
        const RegionalMse m = regional_mse(run.result.net, ds, false);
        mses[s.name] = m;
        mets[s.name] = run.result.metrics;
        table.row({s.name, fmt(s.a), fmt(s.eps), fmt(run.result.metrics.l_psnr),
                   fmt(run.result.metrics.r_psnr), fmt(run.result.metrics.t_psnr),
                   fmt(m.left), fmt(m.right)});

        // Per-sample reconstruction.
        CsvWriter recon(path_join(ctx.out_dir, "recon_" + s.name + ".csv"));
        recon.row({"x", "target", "prediction", "train", "region"});
        const std::vector<double> pred = predict(run.result.net, ds);
        for (std::size_t i = 0; i < ds.count(); ++i)
            recon.row({fmt(ds.coords(0, i)), fmt(ds.targets[i]), fmt(pred[i]),
                       std::to_string(int(ds.train_mask[i])),
                       std::to_string(int(ds.region[i]))});
        outputs.push_back("recon_" + s.name + ".csv");
    }
    outputs.push_back("metrics.csv");

    report.checks.push_back({"kdown_fails_high_region",
                             mses["kdown"].right > mses["kdown"].left, mses["kdown"].right,
                             mses["kdown"].left});
    report.checks.push_back({"kup_low_region_worse_than_reg",
                             mses["kup"].left > mses["reg"].left, mses["kup"].left,
                             mses["reg"].left});
    const double best_unreg = std::max(mets["kdown"].t_psnr, mets["kup"].t_psnr);
    report.checks.push_back({"reg_tpsnr_beats_unreg_by_1db",
                             mets["reg"].t_psnr >= best_unreg + 1.0, mets["reg"].t_psnr,
                             best_unreg + 1.0});

    write_manifest(ctx, outputs);
    return report;
}

namespace {

GridSignal load_or_synth_image(const RunContext& ctx, std::uint64_t synth_seed) {
    const std::string path = ctx.get("image", "");
    if (!path.empty()) return load_image(path);
    return synth_image(synth_seed, ctx.get_size("size", 96));
}

GridSignal prediction_image(const Network& net, const SignalDataset& ds) {
    GridSignal img;
    img.dims = 2;
    img.nx = ds.nx;
    img.ny = ds.ny;
    img.values = predict(net, ds);
    for (double& v : img.values) v = std::clamp(v, 0.0, 1.0);
    return img;
}

double arch_eps(const RunContext& ctx, const std::string& family, double fallback) {
    return ctx.get_double("eps_" + family, ctx.get_double("eps", fallback));
}

}  // namespace

ExperimentReport run_image_uneven(const RunContext& ctx) {
    ensure_out_dir(ctx);
    std::vector<std::string> outputs;
    ExperimentReport report;

    const GridSignal image = load_or_synth_image(ctx, RandomSource::derive_seed(ctx.seed, 1000));
    save_image(image, path_join(ctx.out_dir, "target.pgm"));
    outputs.push_back("target.pgm");

    const double rate = ctx.get_double("rate", 0.1);
    RandomSource ds_rng(RandomSource::derive_seed(ctx.seed, 0));
    const SignalDataset ds = make_uneven_image_dataset(image, rate, ds_rng);

    TrainConfig base;
    base.lr = ctx.get_double("lr", 1e-3);
    base.steps = ctx.get_size("steps", 2000);
    const std::size_t depth = ctx.get_size("depth", 4);
    const std::size_t width = ctx.get_size("width", 96);
    const double xi = ctx.get_double("xi", 0.01);
    const std::size_t n_pairs = ctx.get_size("n_pairs", 256);

    CsvWriter table(path_join(ctx.out_dir, "table.csv"));
    table.row({"arch", "setting", "hyper", "eps", "l_psnr", "r_psnr", "t_psnr"});

    std::size_t cell = 1;
    for (const auto& arch : arch_settings()) {
        const double eps = arch_eps(ctx, arch.name, 5e-3);
        struct Setting {
            std::string name;
            double hyper;
            double eps;
        };
        const std::vector<Setting> settings = {{"kdown", arch.k_down, 0.0},
                                               {"kup", arch.k_up, 0.0},
                                               {"reg", arch.k_up, eps}};
        std::map<std::string, Metrics> mets;
        for (const auto& s : settings) {
            TrainConfig cfg = base;
            cfg.arch = make_arch(arch.name, s.hyper, 2, depth, width);
            cfg.seed = RandomSource::derive_seed(ctx.seed, cell++);
            cfg.reg.epsilon = s.eps;
            cfg.reg.xi_stddevs = {xi};
            cfg.reg.n_pairs = n_pairs;
            const std::string name = arch.name + "_" + s.name;
            const TrainedCell run = train_cell(ctx, name, ds, cfg, outputs);
            mets[s.name] = run.result.metrics;
            table.row({arch.name, s.name, fmt(s.hyper), fmt(s.eps),
                       fmt(run.result.metrics.l_psnr), fmt(run.result.metrics.r_psnr),
                       fmt(run.result.metrics.t_psnr)});
            save_image(prediction_image(run.result.net, ds),
                       path_join(ctx.out_dir, "recon_" + name + ".pgm"));
            outputs.push_back("recon_" + name + ".pgm");
        }
        const double best_unreg = std::max(mets["kdown"].t_psnr, mets["kup"].t_psnr);
        report.checks.push_back({arch.name + "_reg_beats_unreg_by_1db",
                                 mets["reg"].t_psnr > best_unreg + 1.0, mets["reg"].t_psnr,
                                 best_unreg + 1.0});
        report.checks.push_back({arch.name + "_kup_improves_left",
                                 mets["kup"].l_psnr > mets["kdown"].l_psnr,
                                 mets["kup"].l_psnr, mets["kdown"].l_psnr});
        report.checks.push_back({arch.name + "_kup_degrades_right",
                                 mets["kup"].r_psnr < mets["kdown"].r_psnr,
                                 mets["kup"].r_psnr, mets["kdown"].r_psnr});
    }
    outputs.push_back("table.csv");
    write_manifest(ctx, outputs);
    return report;
}

ExperimentReport run_image_sparse(const RunContext& ctx) {
    ensure_out_dir(ctx);
    std::vector<std::string> outputs;
    ExperimentReport report;

    // Corpus: a directory of images, or synthesized instances.
    std::vector<GridSignal> images;
    const std::string dir = ctx.get("images", "");
    if (!dir.empty()) {
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            const auto ext = e.path().extension().string();
            if (ext == ".pgm" || ext == ".ppm" || ext == ".png") files.push_back(e.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) images.push_back(load_image(f));
        if (images.size() < 5)
            throw std::runtime_error("image-sparse: need at least 5 images in " + dir);
    } else {
        const std::size_t n = ctx.get_size("n_images", 5);
        for (std::size_t i = 0; i < n; ++i)
            images.push_back(
                synth_image(RandomSource::derive_seed(ctx.seed, 2000 + i),
                            ctx.get_size("size", 96)));
    }

    const double rate = ctx.get_double("rate", 0.1);
    TrainConfig base;
    base.lr = ctx.get_double("lr", 1e-3);
    base.steps = ctx.get_size("steps", 1500);
    const std::size_t depth = ctx.get_size("depth", 4);
    const std::size_t width = ctx.get_size("width", 64);
    const double xi = ctx.get_double("xi", 0.01);
    const std::size_t n_pairs = ctx.get_size("n_pairs", 256);

    CsvWriter table(path_join(ctx.out_dir, "per_image.csv"));
    table.row({"arch", "image", "regularized", "t_psnr"});
    CsvWriter means(path_join(ctx.out_dir, "summary.csv"));
    means.row({"arch", "mean_psnr_unreg", "mean_psnr_reg", "gain_db"});

    std::size_t cell = 1;
    for (const auto& arch : arch_settings()) {
        const double eps = arch_eps(ctx, arch.name, 5e-3);
        double sum_unreg = 0.0, sum_reg = 0.0;
        for (std::size_t i = 0; i < images.size(); ++i) {
            RandomSource ds_rng(RandomSource::derive_seed(ctx.seed, 3000 + i));
            const SignalDataset ds = make_sparse_dataset(images[i], rate, ds_rng);
            for (const bool reg : {false, true}) {
                TrainConfig cfg = base;
                cfg.arch = make_arch(arch.name, arch.k_up, 2, depth, width);
                cfg.seed = RandomSource::derive_seed(ctx.seed, cell++);
                cfg.reg.epsilon = reg ? eps : 0.0;
                cfg.reg.xi_stddevs = {xi};
                cfg.reg.n_pairs = n_pairs;
                const std::string name =
                    arch.name + "_img" + std::to_string(i) + (reg ? "_reg" : "_unreg");
                const TrainedCell run = train_cell(ctx, name, ds, cfg, outputs);
                (reg ? sum_reg : sum_unreg) += run.result.metrics.t_psnr;
                table.row({arch.name, std::to_string(i), reg ? "1" : "0",
                           fmt(run.result.metrics.t_psnr)});
            }
        }
        const double mean_unreg = sum_unreg / static_cast<double>(images.size());
        const double mean_reg = sum_reg / static_cast<double>(images.size());
        means.row({arch.name, fmt(mean_unreg), fmt(mean_reg), fmt(mean_reg - mean_unreg)});
        report.checks.push_back({arch.name + "_reg_mean_gain_1db",
                                 mean_reg > mean_unreg + 1.0, mean_reg, mean_unreg + 1.0});
    }
    outputs.push_back("per_image.csv");
    outputs.push_back("summary.csv");
    write_manifest(ctx, outputs);
    return report;
}

namespace {

// Smallest feature-derivative magnitude of the penultimate tap over the grid.
double min_feature_derivative(const Network& net, std::size_t resolution) {
    Matrix X(1, resolution);
    const double step = 2.0 / static_cast<double>(resolution);
    for (std::size_t i = 0; i < resolution; ++i)
        X(0, i) = -1.0 + step * static_cast<double>(i);
    Matrix pen;
    forward_batch(net, X, &pen);
    double best = 1e300;
    for (std::size_t j = 1; j + 1 < resolution; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < pen.rows(); ++i) {
            const double d = (pen(i, j + 1) - pen(i, j - 1)) / (2.0 * step);
            s += d * d;
        }
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

int count_inversions(const std::vector<double>& v, bool decreasing) {
    int inversions = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (decreasing ? v[i] > v[i - 1] : v[i] < v[i - 1]) ++inversions;
    }
    return inversions;
}

}  // namespace

ExperimentReport run_spectrum_depth(const RunContext& ctx) {
    ensure_out_dir(ctx);
    std::vector<std::string> outputs;
    ExperimentReport report;

    const std::size_t samples = ctx.get_size("samples", 512);
    const double rate = ctx.get_double("rate", 0.33);
    const std::vector<double> low = parse_list(ctx.get("low_freqs", "1.5,3"));
    const std::vector<double> high = parse_list(ctx.get("high_freqs", "10,14"));
    const GridSignal wave = synth_multiband_wave(samples, low, high, 0.5);
    RandomSource ds_rng(RandomSource::derive_seed(ctx.seed, 0));
    const SignalDataset ds = make_sparse_dataset(wave, rate, ds_rng);

    const std::string family = ctx.get("family", "gaussian");
    const std::vector<double> depth_sweep = parse_list(ctx.get("depth_sweep", "2,3,4,5,6"));
    const double depth_hyper = ctx.get_double("depth_hyper", 0.2);
    const std::vector<double> hyper_sweep =
        parse_list(ctx.get("hyper_sweep", "0.5,0.3,0.2,0.1,0.05"));
    const std::size_t hyper_depth = ctx.get_size("hyper_depth", 4);
    const std::size_t width = ctx.get_size("width", 64);

    TrainConfig base;
    base.lr = ctx.get_double("lr", 1e-3);
    base.steps = ctx.get_size("steps", 3000);

    const std::size_t oversample = 4 * samples;
    const double cutoff = static_cast<double>(samples) / 16.0;  // quarter of train Nyquist

    CsvWriter table(path_join(ctx.out_dir, "sweep.csv"));
    table.row({"sweep", "depth", "hyper", "low_fraction", "min_feature_derivative"});

    GridSignal heat;
    heat.dims = 2;
    heat.nx = oversample;
    heat.ny = depth_sweep.size() + hyper_sweep.size();
    heat.values.assign(heat.nx * heat.ny, 0.0);
    std::size_t heat_row = 0;

    auto run_one = [&](const std::string& sweep, std::size_t depth, double hyper,
                       std::size_t cell) {
        TrainConfig cfg = base;
        cfg.arch = make_arch(family, hyper, 1, depth, width);
        cfg.seed = RandomSource::derive_seed(ctx.seed, cell);
        const std::string name = sweep + "_d" + std::to_string(depth) + "_h" + fmt6(hyper);
        const TrainedCell run = train_cell(ctx, name, ds, cfg, outputs);
        const SpectrumGrid spec = dft(mean_subtracted(sample_grid(run.result.net, oversample)));
        const EnergySummary e = energy_summary(spec, cutoff);
        const double min_deriv = min_feature_derivative(run.result.net, samples);
        table.row({sweep, std::to_string(depth), fmt(hyper), fmt(e.low_fraction),
                   fmt(min_deriv)});
        // One heatmap row per run: log magnitudes, DC centered.
        const GridSignal row = spectrum_heatmap(spec);
        for (std::size_t i = 0; i < heat.nx; ++i)
            heat.values[heat_row * heat.nx + i] = row.values[i];
        ++heat_row;
        return std::make_pair(e.low_fraction, min_deriv);
    };

    std::size_t cell = 1;
    std::vector<double> depth_low, depth_deriv;
    for (double d : depth_sweep) {
        const auto [lf, md] = run_one("depth", static_cast<std::size_t>(d), depth_hyper, cell++);
        depth_low.push_back(lf);
        depth_deriv.push_back(md);
    }
    std::vector<double> hyper_low;
    for (double h : hyper_sweep) {
        const auto [lf, md] = run_one("hyper", hyper_depth, h, cell++);
        hyper_low.push_back(lf);
    }

    save_image(heat, path_join(ctx.out_dir, "spectra.pgm"));
    outputs.push_back("spectra.pgm");
    outputs.push_back("sweep.csv");

    report.checks.push_back({"depth_sweep_low_fraction_decreases",
                             count_inversions(depth_low, true) <= 1,
                             static_cast<double>(count_inversions(depth_low, true)), 1.0});
    report.checks.push_back({"hyper_sweep_low_fraction_decreases",
                             count_inversions(hyper_low, true) <= 1,
                             static_cast<double>(count_inversions(hyper_low, true)), 1.0});
    report.checks.push_back({"depth_sweep_min_derivative_increases",
                             count_inversions(depth_deriv, false) <= 1,
                             static_cast<double>(count_inversions(depth_deriv, false)), 1.0});

    write_manifest(ctx, outputs);
    return report;
}

ExperimentReport run_derivative_maps(const RunContext& ctx) {
    ensure_out_dir(ctx);
    std::vector<std::string> outputs;
    ExperimentReport report;

    const GridSignal image = load_or_synth_image(ctx, RandomSource::derive_seed(ctx.seed, 1000));
    save_image(image, path_join(ctx.out_dir, "target.pgm"));
    outputs.push_back("target.pgm");

    const double rate = ctx.get_double("rate", 0.1);
    RandomSource ds_rng(RandomSource::derive_seed(ctx.seed, 0));
    const SignalDataset ds = make_sparse_dataset(image, rate, ds_rng);

    TrainConfig base;
    base.lr = ctx.get_double("lr", 1e-3);
    base.steps = ctx.get_size("steps", 1200);
    const std::size_t depth = ctx.get_size("depth", 4);
    const std::size_t width = ctx.get_size("width", 64);
    const double k_down = ctx.get_double("sigma_down", 0.5);
    const double k_up = ctx.get_double("sigma_up", 0.05);
    const double eps = ctx.get_double("eps", 5e-3);
    const double xi = ctx.get_double("xi", 0.01);
    const std::size_t n_pairs = ctx.get_size("n_pairs", 256);
    const std::size_t oversample = 2 * image.nx;

    struct Setting {
        std::string name;
        double hyper;
        double eps;
    };
    const std::vector<Setting> settings = {
        {"kdown", k_down, 0.0}, {"kup", k_up, 0.0}, {"reg", k_up, eps}};

    CsvWriter table(path_join(ctx.out_dir, "gradient_means.csv"));
    table.row({"setting", "hyper", "eps", "mean_gradient_magnitude"});

    std::map<std::string, double> means;
    std::size_t cell = 1;
    for (const auto& s : settings) {
        TrainConfig cfg = base;
        cfg.arch = make_arch("gaussian", s.hyper, 2, depth, width);
        cfg.seed = RandomSource::derive_seed(ctx.seed, cell++);
        cfg.reg.epsilon = s.eps;
        cfg.reg.xi_stddevs = {xi};
        cfg.reg.n_pairs = n_pairs;
        const TrainedCell run = train_cell(ctx, s.name, ds, cfg, outputs);

        // |grad f| on the oversampled grid by central differences.
        const SampledGrid grid = sample_grid(run.result.net, oversample);
        const double h = 2.0 / static_cast<double>(oversample);
        GridSignal map;
        map.dims = 2;
        map.nx = oversample;
        map.ny = oversample;
        map.values.assign(oversample * oversample, 0.0);
        double sum = 0.0;
        std::size_t count = 0;
        double peak = 0.0;
        for (std::size_t iy = 1; iy + 1 < oversample; ++iy) {
            for (std::size_t ix = 1; ix + 1 < oversample; ++ix) {
                const double gx = (grid.values[iy * oversample + ix + 1] -
                                   grid.values[iy * oversample + ix - 1]) /
                                  (2.0 * h);
                const double gy = (grid.values[(iy + 1) * oversample + ix] -
                                   grid.values[(iy - 1) * oversample + ix]) /
                                  (2.0 * h);
                const double mag = std::hypot(gx, gy);
                map.values[iy * oversample + ix] = mag;
                sum += mag;
                peak = std::max(peak, mag);
                ++count;
            }
        }
        const double mean = sum / static_cast<double>(count);
        means[s.name] = mean;
        if (peak > 0.0)
            for (double& v : map.values) v /= peak;
        save_image(map, path_join(ctx.out_dir, "gradmap_" + s.name + ".pgm"));
        outputs.push_back("gradmap_" + s.name + ".pgm");
        table.row({s.name, fmt(s.hyper), fmt(s.eps), fmt(mean)});
    }
    outputs.push_back("gradient_means.csv");

    report.checks.push_back({"kup_more_complex_than_kdown", means["kup"] > means["kdown"],
                             means["kup"], means["kdown"]});
    report.checks.push_back({"reg_smoother_than_kup", means["reg"] < means["kup"],
                             means["reg"], means["kup"]});

    write_manifest(ctx, outputs);
    return report;
}

}  // namespace cmlp::exp
