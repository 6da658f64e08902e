#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hnoma/montecarlo.hpp"

namespace hnoma {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

// Binary PGM (P5), maxval 255. Parse failures throw std::runtime_error with
// the byte offset of the problem; write(read(f)) is byte-identical for files
// in the canonical "P5\n<w> <h>\n255\n" form.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

// MSB-first bit serialization; exact inverses of each other.
std::vector<int> image_to_bits(const GrayImage& img);
GrayImage bits_to_image(const std::vector<int>& bits, int width, int height);

double mse(const GrayImage& a, const GrayImage& b);
// 10*log10(255^2 / MSE); identical images report +infinity.
double psnr(const GrayImage& a, const GrayImage& b);

enum class SyntheticPattern { gradient, checkerboard, filtered_noise };

// Deterministic synthetic test images. `scale` is the checkerboard cell edge
// or the blur radius shaping the noise spectrum; the gradient ignores it.
GrayImage make_synthetic_image(SyntheticPattern pattern, int width, int height,
                               std::uint64_t seed = 1, int scale = 16);

struct ImagePairResult {
  GrayImage recon_far;
  GrayImage recon_near;
  double mse_far = 0.0;
  double mse_near = 0.0;
  double psnr_far = 0.0;
  double psnr_near = 0.0;
  long long bit_errors_far = 0;
  long long bit_errors_near = 0;
};

// Sends image_far as user 1 and image_near as user 2 through the configured
// two-user scenario at the single SNR point of cfg.snr_grid_db. Bitstreams
// are zero-padded to whole blocks; padding is dropped on reconstruction.
// Channel and noise draws follow the same stream discipline as run_scenario,
// so equal seeds give common random numbers across schemes.
ImagePairResult transmit_image_pair(const GrayImage& image_far,
                                    const GrayImage& image_near,
                                    const ScenarioConfig& cfg);

}  // namespace hnoma
