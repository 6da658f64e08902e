#include "hnoma/modem.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "hnoma/hadamard.hpp"
#include "hnoma/rng.hpp"

namespace hnoma {

namespace {

// Scale points so the mean energy under probs becomes exactly 1.
void normalize_energy(Constellation& c) {
  double e = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i)
    e += c.probs[i] * std::norm(c.points[i]);
  if (e <= 0.0)
    throw std::invalid_argument("constellation has zero mean energy");
  c.raw_energy = e;
  c.kappa = 1.0 / std::sqrt(e);
  for (auto& p : c.points) p *= c.kappa;
  double check = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i)
    check += c.probs[i] * std::norm(c.points[i]);
  c.avg_energy = check;
}

void fill_identity_labels(Constellation& c) {
  c.labels.resize(c.points.size());
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    c.labels[i] = static_cast<int>(i);
}

int gray_decode(int g) {
  int b = g;
  for (int sh = 1; sh < 16; sh <<= 1) b ^= b >> sh;
  return b;
}

Constellation raw_pam(int level_count, std::vector<double> probs,
                      const char* name) {
  if (level_count < 2)
    throw std::invalid_argument("pam level_count must be >= 2, got " +
                                std::to_string(level_count));
  Constellation c;
  c.name = name;
  c.probs = std::move(probs);
  for (int l = 0; l < level_count; ++l)
    c.points.emplace_back(2.0 * l - (level_count - 1), 0.0);
  fill_identity_labels(c);
  normalize_energy(c);
  return c;
}

}  // namespace

Constellation build_shifted_integer_pam(int level_count) {
  if (level_count < 2)
    throw std::invalid_argument("pam level_count must be >= 2, got " +
                                std::to_string(level_count));
  std::vector<double> probs(level_count, 1.0 / level_count);
  return raw_pam(level_count, std::move(probs), "pam-uniform");
}

Constellation build_shifted_integer_pam(int level_count,
                                        const std::vector<double>& level_probs) {
  if (level_count < 2)
    throw std::invalid_argument("pam level_count must be >= 2, got " +
                                std::to_string(level_count));
  if (static_cast<int>(level_probs.size()) != level_count)
    throw std::invalid_argument("level_probs size does not match level_count");
  double sum = 0.0;
  for (double p : level_probs) {
    if (p < 0.0) throw std::invalid_argument("negative level probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("level probabilities must sum to 1");
  return raw_pam(level_count, level_probs, "pam-weighted");
}

Constellation pam_for_hadamard(int order) {
  const HadamardMatrix h = build_hadamard(order);
  const int level_count = 3 * order / 2 + 1;
  std::vector<double> counts(level_count, 0.0);
  double total = 0.0;

  if (order <= 8) {
    std::vector<int> bits(order);
    for (int pattern = 0; pattern < (1 << order); ++pattern) {
      for (int k = 0; k < order; ++k) bits[k] = (pattern >> k) & 1;
      const TransformedVector tv = forward_transform(bits, h);
      for (long long level : tv.shifted) counts[level] += 1.0;
      total += order;
    }
  } else {
    RngStream rng(0x68616461u, static_cast<std::uint64_t>(order), 0, 0, 0);
    const long long blocks = std::max<long long>(1, 1000000 / order);
    std::vector<long long> v(order);
    for (long long b = 0; b < blocks; ++b) {
      for (int k = 0; k < order; ++k) v[k] = rng.bit();
      fwht(v);
      for (int k = 0; k < order; ++k) counts[v[k] + order / 2] += 1.0;
      total += order;
    }
  }

  std::vector<double> probs(level_count);
  for (int l = 0; l < level_count; ++l) probs[l] = counts[l] / total;
  Constellation c = raw_pam(level_count, std::move(probs), "pam-hadamard");
  c.name += "-" + std::to_string(order);
  return c;
}

Constellation build_level_ring_psk(int level_count) {
  if (level_count < 2)
    throw std::invalid_argument("ring level_count must be >= 2, got " +
                                std::to_string(level_count));
  Constellation c;
  c.name = "ring-" + std::to_string(level_count);
  c.probs.assign(level_count, 1.0 / level_count);
  for (int l = 0; l < level_count; ++l) {
    const double phase = M_PI / 4.0 + 2.0 * M_PI * l / level_count;
    c.points.emplace_back(std::cos(phase), std::sin(phase));
  }
  fill_identity_labels(c);
  normalize_energy(c);
  return c;
}

Constellation build_square_qam(int m) {
  if (m != 4 && m != 16 && m != 64)
    throw std::invalid_argument("square qam order must be 4, 16 or 64, got " +
                                std::to_string(m));
  const int side = static_cast<int>(std::lround(std::sqrt(double(m))));
  int v = 0;
  while ((1 << v) < m) ++v;
  const int vh = v / 2;
  const int mask = (1 << vh) - 1;

  Constellation c;
  c.name = "qam-" + std::to_string(m);
  c.probs.assign(m, 1.0 / m);
  c.points.resize(m);
  c.label_bits = v;
  for (int label = 0; label < m; ++label) {
    const int i = gray_decode(label >> vh);
    const int q = gray_decode(label & mask);
    c.points[label] = {2.0 * i - (side - 1), 2.0 * q - (side - 1)};
  }
  fill_identity_labels(c);
  normalize_energy(c);
  return c;
}

SymbolStream map_labels(const std::vector<int>& labels, const Constellation& c) {
  SymbolStream s;
  s.symbols.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l < 0 || l >= static_cast<int>(c.size()))
      throw std::invalid_argument("label " + std::to_string(l) + " at index " +
                                  std::to_string(i) + " not in alphabet " +
                                  c.name);
    s.symbols.push_back(c.points[l]);
  }
  s.source_labels = labels;
  return s;
}

int ml_demap(std::complex<double> y, std::complex<double> scale,
             const Constellation& c) {
  if (scale == std::complex<double>(0.0, 0.0))
    throw std::invalid_argument("ml_demap requires a nonzero scale");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < c.size(); ++l) {
    const double d = std::norm(y - scale * c.points[l]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(l);
    }
  }
  return best;
}

}  // namespace hnoma
