#pragma once

#include <string>
#include <vector>

#include "cmlp/analytic_spectrum.hpp"
#include "cmlp/dataset.hpp"
#include "cmlp/spectrum.hpp"

namespace cmlp {

// Grayscale image I/O. PGM/PPM are handled natively; PNG when libpng is
// available at build time. Color inputs are converted by luma. Intensities
// are scaled to [0, 1].
GridSignal load_image(const std::string& path);
// Writer picks the format from the extension (.pgm or .png); values are
// clamped to [0,1] and quantized to 8 bits.
void save_image(const GridSignal& image, const std::string& path);

// Mono 16-bit PCM WAV; samples scaled to [-1, 1]. Multi-channel input keeps
// channel 0.
std::vector<double> load_wav(const std::string& path);

// CSV exports. Floats are printed with %.17g so files round-trip exactly.
void save_spectrum_csv(const SpectrumGrid& spec, const std::string& path);
void save_line_spectra_csv(const std::vector<LineSpectrum>& spectra, double k_max,
                           std::size_t n_samples, const std::string& path);
void save_lattice_csv(const FrequencyLattice& lattice, const std::string& path);

// Log-scaled magnitude heatmap, DC centered, 8-bit grayscale.
GridSignal spectrum_heatmap(const SpectrumGrid& spec);

// Minimal CSV reader for the files this project writes (no quoting).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace cmlp
