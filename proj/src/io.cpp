#include "cmlp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef CMLP_HAS_PNG
#include <png.h>
#endif

namespace cmlp {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

int next_pnm_token(std::istream& is) {
    // Skips whitespace and '#' comments, returns the next integer.
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            is.unget();
            int v;
            is >> v;
            return v;
        }
    }
    throw std::runtime_error("pnm: unexpected end of header");
}

GridSignal load_pnm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_image: cannot open " + path);
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || (m1 != '2' && m1 != '3' && m1 != '5' && m1 != '6'))
        throw std::runtime_error("load_image: unsupported PNM magic in " + path);
    const bool color = m1 == '3' || m1 == '6';
    const bool binary = m1 == '5' || m1 == '6';
    const int w = next_pnm_token(is);
    const int h = next_pnm_token(is);
    const int maxval = next_pnm_token(is);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw std::runtime_error("load_image: bad PNM header in " + path);

    GridSignal img;
    img.dims = 2;
    img.nx = static_cast<std::size_t>(w);
    img.ny = static_cast<std::size_t>(h);
    img.values.resize(img.count());
    const std::size_t channels = color ? 3 : 1;
    const double inv = 1.0 / static_cast<double>(maxval);

    if (binary) {
        is.get();  // single whitespace after maxval
        const bool wide = maxval > 255;
        std::vector<unsigned char> raw(img.count() * channels * (wide ? 2 : 1));
        is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!is) throw std::runtime_error("load_image: truncated PNM data in " + path);
        for (std::size_t i = 0; i < img.count(); ++i) {
            double ch[3] = {0, 0, 0};
            for (std::size_t c = 0; c < channels; ++c) {
                const std::size_t k = (i * channels + c) * (wide ? 2 : 1);
                const unsigned v = wide ? (unsigned(raw[k]) << 8 | raw[k + 1]) : raw[k];
                ch[c] = static_cast<double>(v) * inv;
            }
            img.values[i] = color ? luma(ch[0], ch[1], ch[2]) : ch[0];
        }
    } else {
        for (std::size_t i = 0; i < img.count(); ++i) {
            double ch[3] = {0, 0, 0};
            for (std::size_t c = 0; c < channels; ++c)
                ch[c] = static_cast<double>(next_pnm_token(is)) * inv;
            img.values[i] = color ? luma(ch[0], ch[1], ch[2]) : ch[0];
        }
    }
    return img;
}

void save_pgm(const GridSignal& image, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_image: cannot open " + path);
    os << "P5\n" << image.nx << ' ' << image.ny << "\n255\n";
    std::vector<unsigned char> raw(image.count());
    for (std::size_t i = 0; i < image.count(); ++i) {
        const double v = std::clamp(image.values[i], 0.0, 1.0);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

#ifdef CMLP_HAS_PNG

GridSignal load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("load_image: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        std::fclose(fp);
        throw std::runtime_error("load_image: PNG read failed for " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const std::size_t w = png_get_image_width(png, info);
    const std::size_t h = png_get_image_height(png, info);
    const std::size_t channels = png_get_channels(png, info);
    std::vector<unsigned char> row(w * channels);

    GridSignal img;
    img.dims = 2;
    img.nx = w;
    img.ny = h;
    img.values.resize(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (std::size_t x = 0; x < w; ++x) {
            double v;
            if (channels >= 3)
                v = luma(row[x * channels] / 255.0, row[x * channels + 1] / 255.0,
                         row[x * channels + 2] / 255.0);
            else
                v = row[x * channels] / 255.0;
            img.values[y * w + x] = v;
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

void save_png(const GridSignal& image, const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("save_image: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw std::runtime_error("save_image: PNG write failed for " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.nx),
                 static_cast<png_uint_32>(image.ny), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(image.nx);
    for (std::size_t y = 0; y < image.ny; ++y) {
        for (std::size_t x = 0; x < image.nx; ++x) {
            const double v = std::clamp(image.values[y * image.nx + x], 0.0, 1.0);
            row[x] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

#endif  // CMLP_HAS_PNG

}  // namespace

GridSignal load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("load_image: cannot open " + path);
    unsigned char sig[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(sig), 2);
    probe.close();
    if (sig[0] == 'P') return load_pnm(path);
#ifdef CMLP_HAS_PNG
    if (sig[0] == 0x89 && sig[1] == 'P') return load_png(path);
#endif
    throw std::runtime_error("load_image: unsupported format for " + path);
}

void save_image(const GridSignal& image, const std::string& path) {
    if (image.dims != 2) throw std::invalid_argument("save_image: need a 2D signal");
#ifdef CMLP_HAS_PNG
    if (ends_with(path, ".png")) {
        save_png(image, path);
        return;
    }
#endif
    if (ends_with(path, ".pgm")) {
        save_pgm(image, path);
        return;
    }
    throw std::invalid_argument("save_image: unsupported extension for " + path);
}

std::vector<double> load_wav(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_wav: cannot open " + path);
    auto read_u32 = [&is]() {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
               std::uint32_t(b[3]) << 24;
    };
    auto read_u16 = [&is]() {
        unsigned char b[2];
        is.read(reinterpret_cast<char*>(b), 2);
        return std::uint16_t(b[0] | b[1] << 8);
    };
    char tag[5] = {0};
    is.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error("load_wav: not RIFF");
    read_u32();
    is.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error("load_wav: not WAVE");

    std::uint16_t channels = 0, bits = 0, format = 0;
    std::vector<double> samples;
    while (is.read(tag, 4)) {
        const std::uint32_t size = read_u32();
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            format = read_u16();
            channels = read_u16();
            read_u32();  // sample rate
            read_u32();  // byte rate
            read_u16();  // block align
            bits = read_u16();
            if (size > 16) is.seekg(size - 16, std::ios::cur);
        } else if (std::strncmp(tag, "data", 4) == 0) {
            if (format != 1 || bits != 16 || channels == 0)
                throw std::runtime_error("load_wav: only 16-bit PCM supported");
            const std::size_t frames = size / (2 * channels);
            samples.resize(frames);
            std::vector<unsigned char> raw(size);
            is.read(reinterpret_cast<char*>(raw.data()), size);
            for (std::size_t i = 0; i < frames; ++i) {
                const std::size_t k = i * 2 * channels;
                const auto v = static_cast<std::int16_t>(raw[k] | raw[k + 1] << 8);
                samples[i] = static_cast<double>(v) / 32768.0;
            }
            break;
        } else {
            is.seekg(size + (size & 1), std::ios::cur);
        }
    }
    if (samples.empty()) throw std::runtime_error("load_wav: no sample data in " + path);
    return samples;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_spectrum_csv(const SpectrumGrid& spec, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_spectrum_csv: cannot open " + path);
    if (spec.dims == 1) {
        os << "freq,magnitude\n";
        for (std::size_t i = 0; i < spec.magnitudes.size(); ++i)
            os << fmt(spec.freq(i)) << ',' << fmt(spec.magnitudes[i]) << '\n';
    } else {
        os << "freq_x,freq_y,magnitude\n";
        for (std::size_t i = 0; i < spec.magnitudes.size(); ++i)
            os << fmt(spec.freq(i % spec.resolution)) << ',' << fmt(spec.freq(i / spec.resolution))
               << ',' << fmt(spec.magnitudes[i]) << '\n';
    }
}

void save_line_spectra_csv(const std::vector<LineSpectrum>& spectra, double k_max,
                           std::size_t n_samples, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_line_spectra_csv: cannot open " + path);
    os << "neuron,direction,k_r,envelope\n";
    for (std::size_t s = 0; s < spectra.size(); ++s) {
        const auto& ls = spectra[s];
        std::string dir;
        for (std::size_t i = 0; i < ls.direction.size(); ++i) {
            if (i) dir += ' ';
            dir += fmt(ls.direction[i]);
        }
        if (ls.is_delta()) {
            const auto& d = std::get<DeltaPair>(ls.envelope);
            os << s << ',' << dir << ',' << fmt(d.location) << ',' << fmt(d.mass) << '\n';
            os << s << ',' << dir << ',' << fmt(-d.location) << ',' << fmt(d.mass) << '\n';
        } else {
            for (std::size_t i = 0; i < n_samples; ++i) {
                const double k = -k_max + 2.0 * k_max * static_cast<double>(i) /
                                              static_cast<double>(n_samples - 1);
                os << s << ',' << dir << ',' << fmt(k) << ',' << fmt(ls.envelope_at(k)) << '\n';
            }
        }
    }
}

void save_lattice_csv(const FrequencyLattice& lattice, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_lattice_csv: cannot open " + path);
    const std::size_t n = lattice.points.empty() ? 0 : lattice.points.front().size();
    for (std::size_t i = 0; i < n; ++i) os << (i ? ",k" : "k") << i;
    os << '\n';
    for (const auto& p : lattice.points) {
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << fmt(p[i]);
        os << '\n';
    }
}

GridSignal spectrum_heatmap(const SpectrumGrid& spec) {
    GridSignal img;
    img.dims = 2;
    const std::size_t n = spec.resolution;
    img.nx = n;
    img.ny = spec.dims == 2 ? n : 1;
    img.values.resize(img.count());

    double peak = 0.0;
    for (std::size_t i = 0; i < spec.magnitudes.size(); ++i)
        peak = std::max(peak, spec.magnitudes[i]);
    if (peak <= 0.0) peak = 1.0;
    const double floor_db = 1e-6;
    auto shade = [&](double m) {
        const double r = std::max(m / peak, floor_db);
        return 1.0 + std::log10(r) / (-std::log10(floor_db));  // 1 at peak, 0 at floor
    };
    // fftshift so DC sits at the center.
    if (spec.dims == 1) {
        for (std::size_t q = 0; q < n; ++q)
            img.values[(q + n / 2) % n] = shade(spec.magnitudes[q]);
    } else {
        for (std::size_t qy = 0; qy < n; ++qy)
            for (std::size_t qx = 0; qx < n; ++qx)
                img.values[((qy + n / 2) % n) * n + (qx + n / 2) % n] =
                    shade(spec.magnitudes[qy * n + qx]);
    }
    return img;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_csv: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace cmlp
