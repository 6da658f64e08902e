#include "hnoma/noma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hnoma {

namespace {

std::complex<double> nearest_point(
    std::complex<double> y, std::complex<double> scale,
    const std::vector<std::complex<double>>& points, int* index_out) {
  double best_d = std::numeric_limits<double>::infinity();
  int best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = std::norm(y - scale * points[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  if (index_out) *index_out = best;
  return points[best];
}

}  // namespace

PowerProfile PowerProfile::make(double total_power, std::vector<double> alphas) {
  std::string err;
  auto add = [&err](const std::string& m) {
    if (!err.empty()) err += "; ";
    err += m;
  };
  if (!(total_power >= 0.0)) add("total power must be >= 0");
  if (alphas.empty()) add("at least one power coefficient required");
  double sum = 0.0;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    sum += alphas[k];
    if (!(alphas[k] > 0.0 && alphas[k] <= 1.0))
      add("alpha[" + std::to_string(k + 1) + "] must lie in (0, 1], got " +
          std::to_string(alphas[k]));
    if (k > 0 && !(alphas[k - 1] > alphas[k]))
      add("alphas must be strictly decreasing, violated at position " +
          std::to_string(k + 1));
  }
  if (!alphas.empty() && std::abs(sum - 1.0) > 1e-12)
    add("alphas must sum to 1, got " + std::to_string(sum));
  if (!err.empty()) throw std::invalid_argument("invalid power profile: " + err);
  PowerProfile p;
  p.total_power = total_power;
  p.alphas = std::move(alphas);
  return p;
}

double PowerProfile::layer_scale(std::size_t k, double energy_k) const {
  if (k >= alphas.size())
    throw std::invalid_argument("layer index out of range");
  if (!(energy_k > 0.0))
    throw std::invalid_argument("layer energy must be > 0");
  return std::sqrt(total_power * alphas[k] / energy_k);
}

std::vector<std::complex<double>> superpose(
    const std::vector<std::vector<std::complex<double>>>& layers,
    const PowerProfile& p, const std::vector<double>& layer_energies) {
  if (layers.size() != p.layer_count() ||
      layer_energies.size() != p.layer_count())
    throw std::invalid_argument("superpose needs one stream and one energy per layer");
  const std::size_t n = layers.empty() ? 0 : layers[0].size();
  for (const auto& l : layers)
    if (l.size() != n)
      throw std::invalid_argument("superpose layer streams differ in length");

  std::vector<std::complex<double>> x(n, {0.0, 0.0});
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const double s = p.layer_scale(k, layer_energies[k]);
    for (std::size_t i = 0; i < n; ++i) x[i] += s * layers[k][i];
  }
  return x;
}

SicReport sic_decode(std::complex<double> y, std::complex<double> g_hat,
                     const PowerProfile& p,
                     const std::vector<const Constellation*>& layer_alphabets,
                     std::size_t upto_layer, const SicOptions& opt) {
  if (g_hat == std::complex<double>(0.0, 0.0))
    throw std::invalid_argument("sic requires a nonzero gain estimate");
  if (layer_alphabets.size() != p.layer_count())
    throw std::invalid_argument("sic needs one alphabet per layer");
  if (upto_layer > p.layer_count())
    throw std::invalid_argument("sic target layer exceeds layer count");
  if (!opt.forced_decisions.empty() &&
      opt.forced_decisions.size() != p.layer_count())
    throw std::invalid_argument("forced decisions must cover every layer");
  if (!(opt.residual_rho >= 0.0 && opt.residual_rho <= 1.0))
    throw std::invalid_argument("residual rho must lie in [0, 1]");

  const std::size_t stop = upto_layer == 0 ? p.layer_count() : upto_layer;
  const double keep = 1.0 - std::sqrt(opt.residual_rho);

  SicReport rep;
  std::complex<double> r = y;
  for (std::size_t k = 0; k < stop; ++k) {
    const Constellation& c = *layer_alphabets[k];
    const std::complex<double> scale = g_hat * p.layer_scale(k);
    rep.pre_residuals.push_back(r);
    int label;
    bool forced = false;
    if (!opt.forced_decisions.empty() && opt.forced_decisions[k] >= 0) {
      label = opt.forced_decisions[k];
      if (label >= static_cast<int>(c.size()))
        throw std::invalid_argument("forced label out of alphabet range");
      forced = true;
    } else {
      label = ml_demap(r, scale, c);
    }
    rep.labels.push_back(label);
    rep.forced.push_back(forced ? 1 : 0);
    r -= keep * scale * c.points[label];
  }
  return rep;
}

std::vector<SicReport> tnoma_sic_receive(
    const std::vector<std::complex<double>>& y, std::complex<double> g_hat,
    const PowerProfile& p,
    const std::vector<const Constellation*>& layer_alphabets,
    std::size_t own_layer, const SicOptions& opt) {
  if (own_layer < 1 || own_layer > p.layer_count())
    throw std::invalid_argument("own_layer must lie in 1..layer_count");
  std::vector<SicReport> out;
  out.reserve(y.size());
  for (const auto& sample : y)
    out.push_back(sic_decode(sample, g_hat, p, layer_alphabets, own_layer, opt));
  return out;
}

std::complex<double> hnoma_encode_block(const std::vector<int>& bits,
                                        const PowerProfile& p,
                                        const HadamardMatrix& h,
                                        const Constellation& c) {
  if (bits.size() != static_cast<std::size_t>(h.order) ||
      p.layer_count() != static_cast<std::size_t>(h.order))
    throw std::invalid_argument("block, transform and power profile sizes must agree");
  if (c.size() != 3 * h.order / 2 + 1)
    throw std::invalid_argument(
        "level alphabet must have 3N/2+1 entries for transform order " +
        std::to_string(h.order));
  const TransformedVector tv = forward_transform(bits, h);
  std::complex<double> x{0.0, 0.0};
  for (std::size_t k = 0; k < h.order; ++k)
    x += p.layer_scale(k) * c.points[tv.shifted[k]];
  return x;
}

HnomaBlockResult hnoma_decode_block(std::complex<double> y,
                                    std::complex<double> g_hat,
                                    const PowerProfile& p,
                                    const HadamardMatrix& h,
                                    const Constellation& c,
                                    bool soft_combine,
                                    const SicOptions& opt) {
  if (p.layer_count() != static_cast<std::size_t>(h.order))
    throw std::invalid_argument("power profile order must match the transform");
  if (c.size() != 3 * h.order / 2 + 1)
    throw std::invalid_argument(
        "level alphabet must have 3N/2+1 entries for transform order " +
        std::to_string(h.order));
  if (soft_combine) {
    for (const auto& pnt : c.points)
      if (std::abs(pnt.imag()) > 1e-12)
        throw std::invalid_argument(
            "soft combining needs a real level alphabet (affine level map)");
  }

  std::vector<const Constellation*> alphabets(h.order, &c);
  const SicReport rep = sic_decode(y, g_hat, p, alphabets, 0, opt);

  std::vector<double> levels(h.order);
  if (soft_combine) {
    const double top = double(c.size()) - 1.0;
    for (std::size_t k = 0; k < h.order; ++k) {
      const std::complex<double> scale = g_hat * p.layer_scale(k);
      const double amp = (rep.pre_residuals[k] / scale).real();
      levels[k] = 0.5 * (amp / c.kappa + top);
    }
  } else {
    for (std::size_t k = 0; k < h.order; ++k) levels[k] = rep.labels[k];
  }

  const InverseResult inv = inverse_transform(levels, h);
  HnomaBlockResult out;
  out.bits = inv.bits;
  out.level_labels = rep.labels;
  out.raw = inv.raw;
  return out;
}

std::vector<std::complex<double>> unitary_transform(
    const std::vector<std::complex<double>>& block, const HadamardMatrix& h) {
  if (block.size() != static_cast<std::size_t>(h.order))
    throw std::invalid_argument("block length must equal the transform order");
  const double scale = 1.0 / std::sqrt(double(h.order));
  std::vector<std::complex<double>> out(block.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < h.order; ++i) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < h.order; ++j) {
      if (h.entry(i, j) > 0)
        acc += block[j];
      else
        acc -= block[j];
    }
    out[i] = scale * acc;
  }
  return out;
}

std::complex<double> unoma_encode_block(
    const std::vector<std::complex<double>>& user_symbols,
    const PowerProfile& p, const HadamardMatrix& h) {
  if (user_symbols.size() != static_cast<std::size_t>(h.order) ||
      p.layer_count() != static_cast<std::size_t>(h.order))
    throw std::invalid_argument("block, transform and power profile sizes must agree");
  const auto mixed = unitary_transform(user_symbols, h);
  std::complex<double> x{0.0, 0.0};
  for (std::size_t k = 0; k < h.order; ++k) x += p.layer_scale(k) * mixed[k];
  return x;
}

UnomaContext make_unoma_context(const HadamardMatrix& h, const Constellation& c) {
  const int n = static_cast<int>(h.order);
  if (n > 8)
    throw std::invalid_argument(
        "mixed-alphabet enumeration is limited to transform order <= 8");
  UnomaContext ctx;
  ctx.h = &h;
  ctx.c = &c;
  const double scale = 1.0 / std::sqrt(double(n));
  const std::size_t m = c.size();
  std::size_t combos = 1;
  for (int k = 0; k < n; ++k) combos *= m;

  ctx.layer_points.resize(n);
  for (int row = 0; row < n; ++row) {
    std::vector<std::complex<double>> pts;
    pts.reserve(combos);
    for (std::size_t combo = 0; combo < combos; ++combo) {
      std::size_t rest = combo;
      std::complex<double> acc{0.0, 0.0};
      for (int j = 0; j < n; ++j) {
        const std::size_t lj = rest % m;
        rest /= m;
        if (h.entry(row, j) > 0)
          acc += c.points[lj];
        else
          acc -= c.points[lj];
      }
      pts.push_back(scale * acc);
    }
    std::sort(pts.begin(), pts.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
              });
    std::vector<std::complex<double>> uniq;
    for (const auto& pnt : pts)
      if (uniq.empty() || std::abs(pnt - uniq.back()) > 1e-9)
        uniq.push_back(pnt);
    ctx.layer_points[row] = std::move(uniq);
  }
  return ctx;
}

UnomaBlockResult unoma_decode_block(std::complex<double> y,
                                    std::complex<double> g_hat,
                                    const PowerProfile& p,
                                    const UnomaContext& ctx,
                                    const SicOptions& opt) {
  if (!ctx.h || !ctx.c) throw std::invalid_argument("uninitialized mixing context");
  const int n = static_cast<int>(ctx.h->order);
  if (p.layer_count() != static_cast<std::size_t>(n))
    throw std::invalid_argument("power profile order must match the transform");
  if (!opt.forced_decisions.empty() &&
      opt.forced_decisions.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("forced decisions must cover every layer");
  if (g_hat == std::complex<double>(0.0, 0.0))
    throw std::invalid_argument("sic requires a nonzero gain estimate");

  const double keep = 1.0 - std::sqrt(opt.residual_rho);
  UnomaBlockResult out;
  out.mixed_hat.resize(n);
  std::complex<double> r = y;
  for (int k = 0; k < n; ++k) {
    const std::complex<double> scale = g_hat * p.layer_scale(k);
    std::complex<double> point;
    if (!opt.forced_decisions.empty() && opt.forced_decisions[k] >= 0) {
      const int f = opt.forced_decisions[k];
      if (f >= static_cast<int>(ctx.layer_points[k].size()))
        throw std::invalid_argument("forced label out of mixed-alphabet range");
      point = ctx.layer_points[k][f];
    } else {
      point = nearest_point(r, scale, ctx.layer_points[k], nullptr);
    }
    out.mixed_hat[k] = point;
    r -= keep * scale * point;
  }

  const auto users = unitary_transform(out.mixed_hat, *ctx.h);
  out.labels.resize(n);
  for (int k = 0; k < n; ++k)
    out.labels[k] = ml_demap(users[k], {1.0, 0.0}, *ctx.c);
  return out;
}

SicIdentityReport sic_identity_check(std::complex<double> x1,
                                     std::complex<double> x2, double p1,
                                     double p2, std::complex<double> g,
                                     std::complex<double> n) {
  if (!(p1 > 0.0) || !(p2 > 0.0))
    throw std::invalid_argument("layer powers must be > 0");
  if (g == std::complex<double>(0.0, 0.0))
    throw std::invalid_argument("gain must be nonzero");

  const double ratio = std::sqrt(p2 / p1);
  const std::complex<double> n1 = n / (g * std::sqrt(p1));
  const std::complex<double> n2 = n / (g * std::sqrt(p2));

  SicIdentityReport rep;

  // Far user: sum and difference of the two decoded streams, as printed,
  // halved; against the expanded closed form.
  const std::complex<double> sum_line = x1 + x2 + ratio * (x1 - x2) + n1;
  const std::complex<double> diff_line = x1 - x2 + n2;
  rep.combined_far = 0.5 * (sum_line + diff_line);
  rep.predicted_far =
      0.5 * (2.0 + ratio) * x1 - 0.5 * ratio * x2 + 0.5 * n1 + 0.5 * n2;
  rep.far_residual = std::abs(rep.combined_far - rep.predicted_far);

  // Near user: the decided sum stream is clean, the difference stream keeps
  // its post-cancellation noise; combining halves that noise relative to the
  // direct single-stream estimate.
  const std::complex<double> x2_soft = x2 + n2;
  rep.direct_near = x2_soft;
  rep.combined_near = 0.5 * (x1 - x2_soft);

  // Which sign the noisy difference line actually carries under direct
  // substitution of the decided/soft estimates.
  const std::complex<double> actual_diff = x1 - x2_soft;
  const double res_minus = std::abs(actual_diff - (x1 - x2 - n2));
  const double res_plus = std::abs(actual_diff - (x1 - x2 + n2));
  rep.minus_convention_matches = res_minus <= res_plus;
  return rep;
}

}  // namespace hnoma
