#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hnoma/imaging.hpp"
#include "hnoma/rng.hpp"

using namespace hnoma;

namespace {

std::string tmp_path(const char* name) {
  return std::string("/tmp/hnoma_imaging_") + name;
}

void write_raw(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool read_fails_with(const std::string& path, const char* part) {
  try {
    read_pgm(path);
    return false;
  } catch (const std::runtime_error& e) {
    return std::string(e.what()).find(part) != std::string::npos;
  }
}

GrayImage image_from(int w, int h, std::vector<std::uint8_t> px) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels = std::move(px);
  return img;
}

ScenarioConfig image_scenario(Scheme s) {
  ScenarioConfig cfg;
  cfg.scheme = s;
  cfg.user_count = 2;
  cfg.distances = {2.0, 1.0};
  cfg.alphas = {0.92, 0.08};
  cfg.modulation_orders = {4, 4};
  cfg.fading = FadingModel::awgn;
  cfg.snr_grid_db = {60.0};
  return cfg;
}

}  // namespace

TEST_CASE("pgm round trip and canonical form") {
  const GrayImage img = image_from(2, 2, {0, 255, 128, 64});
  const std::string p = tmp_path("rt.pgm");
  write_pgm(img, p);
  CHECK(slurp(p) == std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x40", 4));

  const GrayImage back = read_pgm(p);
  CHECK(back.width == 2);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);

  // write(read(f)) reproduces a canonical file byte for byte
  const std::string p2 = tmp_path("rt2.pgm");
  write_pgm(back, p2);
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("pgm parser rejects malformed input with byte offsets") {
  const std::string ascii = tmp_path("ascii.pgm");
  write_raw(ascii, "P2\n2 2\n255\n0 1 2 3\n");
  CHECK(read_fails_with(ascii, "P5"));

  const std::string badmax = tmp_path("badmax.pgm");
  write_raw(badmax, std::string("P5\n2 2\n65535\n") + std::string(8, 'x'));
  CHECK(read_fails_with(badmax, "maxval"));
  CHECK(read_fails_with(badmax, "byte 7"));  // offset of the maxval token

  const std::string trunc = tmp_path("trunc.pgm");
  write_raw(trunc, std::string("P5\n4 4\n255\n") + std::string(15, 'x'));
  CHECK(read_fails_with(trunc, "truncated"));
  CHECK(read_fails_with(trunc, "expected 16 bytes, found 15"));

  const std::string nohdr = tmp_path("nohdr.pgm");
  write_raw(nohdr, "P5");
  CHECK(read_fails_with(nohdr, "expected whitespace"));

  CHECK_THROWS_AS(read_pgm(tmp_path("does_not_exist.pgm")), std::runtime_error);

  // comments between header tokens are legal
  const std::string commented = tmp_path("comment.pgm");
  write_raw(commented, std::string("P5\n# generated\n2 2\n255\n") +
                           std::string("\x01\x02\x03\x04", 4));
  const GrayImage c = read_pgm(commented);
  CHECK(c.width == 2);
  CHECK(c.pixels == std::vector<std::uint8_t>{1, 2, 3, 4});
}

TEST_CASE("bit serialization is MSB-first and invertible") {
  const GrayImage one = image_from(1, 1, {0b10110000});
  const std::vector<int> bits = image_to_bits(one);
  CHECK(bits == std::vector<int>{1, 0, 1, 1, 0, 0, 0, 0});

  RngStream rng(42, 0);
  std::vector<std::uint8_t> px(16 * 16);
  for (auto& b : px) b = std::uint8_t(rng.below(256));
  const GrayImage img = image_from(16, 16, px);
  const GrayImage back = bits_to_image(image_to_bits(img), 16, 16);
  CHECK(back.pixels == img.pixels);

  const GrayImage black = bits_to_image(std::vector<int>(8 * 4 * 2, 0), 4, 2);
  for (std::uint8_t v : black.pixels) CHECK(v == 0);

  CHECK_THROWS_AS(bits_to_image(std::vector<int>(7, 0), 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(bits_to_image(std::vector<int>(8, 0), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("distortion metrics") {
  const GrayImage a = image_from(2, 2, {1, 2, 3, 4});
  CHECK(mse(a, a) == 0.0);
  CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());

  const GrayImage lo = image_from(2, 2, {0, 0, 0, 0});
  const GrayImage hi = image_from(2, 2, {255, 255, 255, 255});
  CHECK(mse(lo, hi) == doctest::Approx(255.0 * 255.0));
  CHECK(psnr(lo, hi) == doctest::Approx(0.0));

  const GrayImage one = image_from(2, 2, {10, 0, 0, 0});
  CHECK(mse(lo, one) == doctest::Approx(25.0));
  CHECK(psnr(lo, one) == doctest::Approx(34.1514).epsilon(1e-4));

  const GrayImage other = image_from(1, 4, {1, 2, 3, 4});
  CHECK_THROWS_AS(mse(a, other), std::invalid_argument);

  // the metric depends only on the error pattern, not the base image
  std::vector<std::uint8_t> base1(64), base2(64), d1(64), d2(64);
  RngStream rng(9, 1);
  for (std::size_t i = 0; i < 64; ++i) {
    base1[i] = std::uint8_t(64 + rng.below(128));
    base2[i] = std::uint8_t(64 + rng.below(128));
    const int delta = (i % 5 == 0) ? 20 : (i % 7 == 0 ? -20 : 0);
    d1[i] = std::uint8_t(base1[i] + delta);
    d2[i] = std::uint8_t(base2[i] + delta);
  }
  const double p1 = psnr(image_from(8, 8, base1), image_from(8, 8, d1));
  const double p2 = psnr(image_from(8, 8, base2), image_from(8, 8, d2));
  CHECK(p1 == p2);
}

TEST_CASE("synthetic image generator") {
  const GrayImage g =
      make_synthetic_image(SyntheticPattern::gradient, 32, 16, 1);
  CHECK(g.pixels.front() == 0);
  CHECK(g.pixels.back() == 255);
  CHECK(g.pixels[31] > g.pixels[1]);

  const GrayImage cb =
      make_synthetic_image(SyntheticPattern::checkerboard, 32, 32, 1, 8);
  CHECK(cb.pixels[0] == 0);
  CHECK(cb.pixels[8] == 255);          // one cell to the right
  CHECK(cb.pixels[8 * 32] == 255);     // one cell down
  CHECK(cb.pixels[8 * 32 + 8] == 0);   // diagonal cell matches the origin
  for (std::uint8_t v : cb.pixels) CHECK((v == 0 || v == 255));

  const GrayImage n1 =
      make_synthetic_image(SyntheticPattern::filtered_noise, 64, 64, 5, 6);
  const GrayImage n2 =
      make_synthetic_image(SyntheticPattern::filtered_noise, 64, 64, 5, 6);
  const GrayImage n3 =
      make_synthetic_image(SyntheticPattern::filtered_noise, 64, 64, 6, 6);
  CHECK(n1.pixels == n2.pixels);
  CHECK(n1.pixels != n3.pixels);
  CHECK(*std::min_element(n1.pixels.begin(), n1.pixels.end()) == 0);
  CHECK(*std::max_element(n1.pixels.begin(), n1.pixels.end()) == 255);

  CHECK_THROWS_AS(make_synthetic_image(SyntheticPattern::gradient, 0, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_synthetic_image(SyntheticPattern::checkerboard, 4, 4, 1, 0),
      std::invalid_argument);
}

TEST_CASE("image transmission: clean channel reconstructs exactly") {
  const GrayImage a =
      make_synthetic_image(SyntheticPattern::filtered_noise, 24, 24, 2, 4);
  const GrayImage b =
      make_synthetic_image(SyntheticPattern::checkerboard, 24, 24, 1, 3);

  for (Scheme s : {Scheme::tnoma, Scheme::hnoma, Scheme::unoma}) {
    ScenarioConfig cfg = image_scenario(s);
    if (s == Scheme::tnoma) cfg.alphas = {0.7, 0.3};
    const ImagePairResult r = transmit_image_pair(a, b, cfg);
    CHECK(r.bit_errors_far == 0);
    CHECK(r.bit_errors_near == 0);
    CHECK(r.psnr_far == std::numeric_limits<double>::infinity());
    CHECK(r.psnr_near == std::numeric_limits<double>::infinity());
    CHECK(r.recon_far.pixels == a.pixels);
    CHECK(r.recon_near.pixels == b.pixels);
  }
}

TEST_CASE("image transmission: determinism and precondition checks") {
  const GrayImage a =
      make_synthetic_image(SyntheticPattern::filtered_noise, 16, 16, 3, 4);
  const GrayImage b =
      make_synthetic_image(SyntheticPattern::filtered_noise, 16, 16, 4, 4);

  ScenarioConfig cfg = image_scenario(Scheme::tnoma);
  cfg.alphas = {0.7, 0.3};
  cfg.fading = FadingModel::rayleigh;
  cfg.snr_grid_db = {12.0};
  cfg.seed = 21;
  const ImagePairResult r1 = transmit_image_pair(a, b, cfg);
  const ImagePairResult r2 = transmit_image_pair(a, b, cfg);
  CHECK(r1.recon_far.pixels == r2.recon_far.pixels);
  CHECK(r1.recon_near.pixels == r2.recon_near.pixels);
  CHECK(r1.bit_errors_far == r2.bit_errors_far);
  CHECK(r1.bit_errors_far > 0);  // low SNR under fading must corrupt something
  CHECK(r1.psnr_far < 60.0);
  CHECK(r1.mse_far > 0.0);

  // odd payload versus block size exercises the zero-padding path
  const GrayImage odd_a =
      make_synthetic_image(SyntheticPattern::filtered_noise, 3, 5, 7, 2);
  const GrayImage odd_b =
      make_synthetic_image(SyntheticPattern::filtered_noise, 3, 5, 8, 2);
  ScenarioConfig clean = image_scenario(Scheme::tnoma);
  clean.alphas = {0.7, 0.3};
  clean.modulation_orders = {4, 16};  // unequal block sizes force padding
  const ImagePairResult odd = transmit_image_pair(odd_a, odd_b, clean);
  CHECK(odd.bit_errors_far == 0);
  CHECK(odd.recon_far.pixels == odd_a.pixels);
  CHECK(odd.recon_near.pixels == odd_b.pixels);

  const GrayImage small =
      make_synthetic_image(SyntheticPattern::gradient, 8, 8, 1);
  CHECK_THROWS_AS(transmit_image_pair(a, small, cfg), std::invalid_argument);

  ScenarioConfig four = cfg;
  four.user_count = 4;
  four.distances = {4.0, 3.0, 2.0, 1.0};
  four.alphas = {0.4, 0.3, 0.2, 0.1};
  four.modulation_orders = {4, 4, 4, 4};
  CHECK_THROWS_AS(transmit_image_pair(a, b, four), std::invalid_argument);

  ScenarioConfig grid = cfg;
  grid.snr_grid_db = {10.0, 20.0};
  CHECK_THROWS_AS(transmit_image_pair(a, b, grid), std::invalid_argument);
}

TEST_CASE("image transmission: common randomness across schemes") {
  const GrayImage a =
      make_synthetic_image(SyntheticPattern::filtered_noise, 16, 16, 5, 5);
  const GrayImage b =
      make_synthetic_image(SyntheticPattern::filtered_noise, 16, 16, 6, 5);

  ScenarioConfig cfg = image_scenario(Scheme::hnoma);
  cfg.fading = FadingModel::rayleigh;
  cfg.snr_grid_db = {18.0};
  cfg.seed = 33;
  const ImagePairResult h1 = transmit_image_pair(a, b, cfg);
  cfg.hnoma_soft_combine = true;
  const ImagePairResult h2 = transmit_image_pair(a, b, cfg);
  // same chain, same draws; only the combining rule differs
  CHECK(h1.bit_errors_far >= 0);
  CHECK(h2.bit_errors_far >= 0);
  // soft combining must not disturb determinism
  const ImagePairResult h3 = transmit_image_pair(a, b, cfg);
  CHECK(h2.recon_far.pixels == h3.recon_far.pixels);
}
