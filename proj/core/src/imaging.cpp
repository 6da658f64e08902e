#include "hnoma/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hnoma/hadamard.hpp"
#include "hnoma/modem.hpp"
#include "hnoma/noma.hpp"
#include "hnoma/rng.hpp"

namespace hnoma {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t offset,
                             const std::string& what) {
  std::ostringstream os;
  os << path << ": pgm parse error at byte " << offset << ": " << what;
  throw std::runtime_error(os.str());
}

// whitespace plus '#' comments running to end of line
std::size_t skip_separators(const std::string& buf, std::size_t pos,
                            const std::string& path) {
  bool moved = false;
  while (pos < buf.size()) {
    const unsigned char c = buf[pos];
    if (std::isspace(c)) {
      ++pos;
      moved = true;
    } else if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (!moved) parse_fail(path, pos, "expected whitespace");
  return pos;
}

long parse_number(const std::string& buf, std::size_t& pos,
                  const std::string& path, const char* name) {
  if (pos >= buf.size() || !std::isdigit(static_cast<unsigned char>(buf[pos])))
    parse_fail(path, pos, std::string("expected ") + name);
  long v = 0;
  while (pos < buf.size() &&
         std::isdigit(static_cast<unsigned char>(buf[pos]))) {
    v = v * 10 + (buf[pos] - '0');
    if (v > 1000000000L) parse_fail(path, pos, std::string(name) + " overflow");
    ++pos;
  }
  return v;
}

void check_dims(int width, int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("image dimensions must be positive");
}

void check_same_shape(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("image dimensions differ");
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream tmp;
  tmp << in.rdbuf();
  const std::string buf = tmp.str();

  if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5')
    parse_fail(path, 0, "expected P5 magic (binary graymap)");
  std::size_t pos = 2;
  pos = skip_separators(buf, pos, path);
  const long w = parse_number(buf, pos, path, "width");
  pos = skip_separators(buf, pos, path);
  const long h = parse_number(buf, pos, path, "height");
  pos = skip_separators(buf, pos, path);
  const std::size_t maxval_at = pos;
  const long maxval = parse_number(buf, pos, path, "maxval");
  if (maxval != 255) parse_fail(path, maxval_at, "maxval must be 255");
  if (pos >= buf.size() ||
      !std::isspace(static_cast<unsigned char>(buf[pos])))
    parse_fail(path, pos, "expected single whitespace after maxval");
  ++pos;

  if (w < 1 || h < 1) parse_fail(path, 2, "dimensions must be positive");
  const std::size_t need = std::size_t(w) * std::size_t(h);
  if (buf.size() - pos < need) {
    std::ostringstream os;
    os << "payload truncated: expected " << need << " bytes, found "
       << (buf.size() - pos);
    parse_fail(path, pos, os.str());
  }

  GrayImage img;
  img.width = int(w);
  img.height = int(h);
  img.pixels.assign(buf.begin() + long(pos), buf.begin() + long(pos + need));
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  check_dims(img.width, img.height);
  if (img.pixels.size() != std::size_t(img.width) * std::size_t(img.height))
    throw std::invalid_argument("pixel count does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            std::streamsize(img.pixels.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<int> image_to_bits(const GrayImage& img) {
  std::vector<int> bits;
  bits.reserve(img.pixels.size() * 8);
  for (std::uint8_t b : img.pixels)
    for (int k = 7; k >= 0; --k) bits.push_back((b >> k) & 1);
  return bits;
}

GrayImage bits_to_image(const std::vector<int>& bits, int width, int height) {
  check_dims(width, height);
  const std::size_t need = std::size_t(width) * std::size_t(height) * 8;
  if (bits.size() != need)
    throw std::invalid_argument("bit count does not match image dimensions");
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(need / 8);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    int v = 0;
    for (int k = 0; k < 8; ++k) v = (v << 1) | (bits[i * 8 + k] & 1);
    img.pixels[i] = std::uint8_t(v);
  }
  return img;
}

double mse(const GrayImage& a, const GrayImage& b) {
  check_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(b.pixels[i]);
    acc += d * d;
  }
  return acc / double(a.pixels.size());
}

double psnr(const GrayImage& a, const GrayImage& b) {
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

GrayImage make_synthetic_image(SyntheticPattern pattern, int width, int height,
                               std::uint64_t seed, int scale) {
  check_dims(width, height);
  if (scale < 1) throw std::invalid_argument("scale must be >= 1");
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(std::size_t(width) * std::size_t(height));

  switch (pattern) {
    case SyntheticPattern::gradient: {
      const double span = double(width - 1 + height - 1);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          img.pixels[std::size_t(y) * width + x] = std::uint8_t(
              std::lround(span == 0.0 ? 0.0 : 255.0 * (x + y) / span));
      break;
    }
    case SyntheticPattern::checkerboard:
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          img.pixels[std::size_t(y) * width + x] =
              ((x / scale + y / scale) % 2) ? 255 : 0;
      break;
    case SyntheticPattern::filtered_noise: {
      RngStream rng(seed, 0x494d47, 0, 0);
      std::vector<double> field(img.pixels.size());
      for (double& v : field) v = rng.gauss();
      // separable box blur shapes the spectrum: larger radius, smoother image
      std::vector<double> tmp(field.size());
      auto blur_axis = [&](bool horizontal) {
        const int n = horizontal ? width : height;
        const int m = horizontal ? height : width;
        for (int j = 0; j < m; ++j) {
          double run = 0.0;
          auto at = [&](int i) -> double& {
            return field[horizontal ? std::size_t(j) * width + i
                                    : std::size_t(i) * width + j];
          };
          for (int i = 0; i < std::min(scale, n); ++i) run += at(i);
          for (int i = 0; i < n; ++i) {
            const int lo = i - scale - 1, hi = i + scale;
            if (hi < n) run += at(hi);
            if (lo >= 0) run -= at(lo);
            tmp[horizontal ? std::size_t(j) * width + i
                           : std::size_t(i) * width + j] = run;
          }
        }
        field.swap(tmp);
      };
      blur_axis(true);
      blur_axis(false);
      const auto [mn, mx] = std::minmax_element(field.begin(), field.end());
      const double lo = *mn, span = std::max(1e-12, *mx - lo);
      for (std::size_t i = 0; i < field.size(); ++i)
        img.pixels[i] = std::uint8_t(
            std::lround(255.0 * (field[i] - lo) / span));
      break;
    }
  }
  return img;
}

namespace {

// mirrors run_scenario's stream discipline (single SNR point = index 0)
struct ChainStreams {
  RngStream csi;
  RngStream gains;
  RngStream noise;
  ChainStreams(std::uint64_t seed, std::uint64_t chunk)
      : csi(seed, 0, chunk, 2), gains(seed, 0, chunk, 1),
        noise(seed, 0, chunk, 3) {}
};

}  // namespace

ImagePairResult transmit_image_pair(const GrayImage& image_far,
                                    const GrayImage& image_near,
                                    const ScenarioConfig& cfg) {
  check_same_shape(image_far, image_near);
  validate_scenario(cfg);
  if (cfg.user_count != 2)
    throw std::invalid_argument("image transmission needs a two-user scenario");
  if (cfg.snr_grid_db.size() != 1)
    throw std::invalid_argument(
        "image transmission uses a single-point SNR grid");

  const double n0 = noise_from_bandwidth(cfg.bandwidth_hz).n0_linear;
  const double ps = n0 * std::pow(10.0, cfg.snr_grid_db[0] / 10.0);
  const PowerProfile prof = PowerProfile::make(ps, cfg.alphas);
  SicOptions opt;
  opt.residual_rho = cfg.residual_rho;

  // per-scheme alphabets and per-user bits per block
  std::vector<Constellation> per_user;
  std::vector<const Constellation*> layer_ptrs;
  HadamardMatrix had;
  Constellation levels, qam;
  UnomaContext ctx;
  int bits_per_block[2] = {1, 1};
  switch (cfg.scheme) {
    case Scheme::tnoma:
      for (int u = 0; u < 2; ++u) {
        const int m = cfg.modulation_orders[u];
        per_user.push_back(m == 2 ? build_shifted_integer_pam(2)
                                  : build_square_qam(m));
        bits_per_block[u] = int(std::lround(std::log2(double(m))));
      }
      for (const auto& c : per_user) layer_ptrs.push_back(&c);
      break;
    case Scheme::hnoma:
      had = build_hadamard(2);
      levels = cfg.hnoma_ring_levels ? build_level_ring_psk(4)
                                     : pam_for_hadamard(2);
      break;
    case Scheme::unoma:
      had = build_hadamard(2);
      qam = build_square_qam(cfg.modulation_orders[0]);
      ctx = make_unoma_context(had, qam);
      bits_per_block[0] = bits_per_block[1] =
          int(std::lround(std::log2(double(cfg.modulation_orders[0]))));
      break;
  }

  const std::vector<int> src[2] = {image_to_bits(image_far),
                                   image_to_bits(image_near)};
  const std::size_t payload = src[0].size();
  std::size_t blocks = 0;
  for (int u = 0; u < 2; ++u)
    blocks = std::max(blocks, (payload + bits_per_block[u] - 1) /
                                  std::size_t(bits_per_block[u]));
  std::vector<int> recon[2];
  recon[0].reserve(payload);
  recon[1].reserve(payload);

  ImagePairResult out;
  long long* err_count[2] = {&out.bit_errors_far, &out.bit_errors_near};

  auto src_bit = [&](int u, std::size_t idx) {
    return idx < payload ? src[u][idx] : 0;  // zero padding past the payload
  };

  std::unique_ptr<ChainStreams> streams;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (b % std::size_t(cfg.chunk_blocks) == 0)
      streams = std::make_unique<ChainStreams>(
          cfg.seed, b / std::size_t(cfg.chunk_blocks));

    int truth[2] = {0, 0};
    std::complex<double> x{0.0, 0.0};
    switch (cfg.scheme) {
      case Scheme::tnoma:
        for (int u = 0; u < 2; ++u) {
          for (int k = 0; k < bits_per_block[u]; ++k)
            truth[u] = (truth[u] << 1) |
                       src_bit(u, b * std::size_t(bits_per_block[u]) + k);
          x += prof.layer_scale(std::size_t(u)) * per_user[u].points[truth[u]];
        }
        break;
      case Scheme::hnoma: {
        const std::vector<int> d = {src_bit(0, b), src_bit(1, b)};
        truth[0] = d[0];
        truth[1] = d[1];
        x = hnoma_encode_block(d, prof, had, levels);
        break;
      }
      case Scheme::unoma: {
        std::vector<std::complex<double>> sym(2);
        for (int u = 0; u < 2; ++u) {
          for (int k = 0; k < bits_per_block[u]; ++k)
            truth[u] = (truth[u] << 1) |
                       src_bit(u, b * std::size_t(bits_per_block[u]) + k);
          sym[u] = qam.points[truth[u]];
        }
        x = unoma_encode_block(sym, prof, had);
        break;
      }
    }

    for (int u = 0; u < 2; ++u) {
      std::complex<double> g, g_hat;
      switch (cfg.fading) {
        case FadingModel::rayleigh: {
          const ChannelRealization cr =
              imperfect_csi_split(cfg.distances[u], cfg.path_loss_exponent,
                                  cfg.sigma_e2, streams->csi, cfg.csi_mode);
          g = std::sqrt(2.0) * cr.g;
          g_hat = std::sqrt(2.0) * cr.g_hat;
          break;
        }
        case FadingModel::nakagami:
          g = nakagami_gain(cfg.distances[u], cfg.path_loss_exponent,
                            cfg.nakagami_m, streams->gains);
          g_hat = g;
          break;
        case FadingModel::awgn:
          g = std::pow(cfg.distances[u], -0.5 * cfg.path_loss_exponent);
          g_hat = g;
          break;
      }
      const std::complex<double> y = g * x + awgn_sample(n0, streams->noise);

      int decided = 0;
      switch (cfg.scheme) {
        case Scheme::tnoma:
          decided = sic_decode(y, g_hat, prof, layer_ptrs, std::size_t(u) + 1,
                               opt)
                        .labels[u];
          break;
        case Scheme::hnoma:
          decided = hnoma_decode_block(y, g_hat, prof, had, levels,
                                       cfg.hnoma_soft_combine, opt)
                        .bits[u];
          break;
        case Scheme::unoma:
          decided = unoma_decode_block(y, g_hat, prof, ctx, opt).labels[u];
          break;
      }
      for (int k = bits_per_block[u] - 1; k >= 0; --k) {
        const std::size_t idx = b * std::size_t(bits_per_block[u]) +
                                std::size_t(bits_per_block[u] - 1 - k);
        const int bit = (decided >> k) & 1;
        if (idx < payload) {
          recon[u].push_back(bit);
          *err_count[u] += bit != src_bit(u, idx) ? 1 : 0;
        }
      }
    }
  }

  out.recon_far = bits_to_image(recon[0], image_far.width, image_far.height);
  out.recon_near = bits_to_image(recon[1], image_near.width, image_near.height);
  out.mse_far = mse(image_far, out.recon_far);
  out.mse_near = mse(image_near, out.recon_near);
  out.psnr_far = psnr(image_far, out.recon_far);
  out.psnr_near = psnr(image_near, out.recon_near);
  return out;
}

}  // namespace hnoma
