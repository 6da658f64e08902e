#include "hnoma/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hnoma/hadamard.hpp"
#include "hnoma/modem.hpp"
#include "hnoma/noma.hpp"

namespace hnoma {

namespace {

// rng stream purposes; schemes deliberately do not key the channel-facing
// streams, so runs with the same seed see identical realizations
constexpr std::uint64_t kPurposeBits = 0;
constexpr std::uint64_t kPurposeGains = 1;
constexpr std::uint64_t kPurposeCsi = 2;
constexpr std::uint64_t kPurposeNoise = 3;

// the estimate/error split normalizes mean channel power to d^-eta/2;
// restore unit-mean fading power so the SNR axis lines up with the
// closed-form curves, which take E|h|^2 = 1
const double kUnitFadingPower = std::sqrt(2.0);

bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int bits_for_order(int m) { return int(std::lround(std::log2(double(m)))); }

struct SchemeAssets {
  std::vector<Constellation> per_user;  // layered scheme
  HadamardMatrix h;                     // both transform schemes
  Constellation levels;                 // transform-domain level alphabet
  Constellation qam;                    // unitary-mixing symbol alphabet
  UnomaContext ctx;
  std::vector<int> bits_per_user;
};

void prepare_assets(const ScenarioConfig& cfg, SchemeAssets& as) {
  const int nu = cfg.user_count;
  as.bits_per_user.assign(nu, 1);
  switch (cfg.scheme) {
    case Scheme::tnoma:
      for (int u = 0; u < nu; ++u) {
        const int m = cfg.modulation_orders[u];
        as.per_user.push_back(m == 2 ? build_shifted_integer_pam(2)
                                     : build_square_qam(m));
        as.bits_per_user[u] = bits_for_order(m);
      }
      break;
    case Scheme::hnoma:
      as.h = build_hadamard(nu);
      as.levels = cfg.hnoma_ring_levels
                      ? build_level_ring_psk(3 * nu / 2 + 1)
                      : pam_for_hadamard(nu);
      break;
    case Scheme::unoma:
      as.h = build_hadamard(nu);
      as.qam = build_square_qam(cfg.modulation_orders[0]);
      as.ctx = make_unoma_context(as.h, as.qam);
      for (int u = 0; u < nu; ++u)
        as.bits_per_user[u] = bits_for_order(cfg.modulation_orders[0]);
      break;
  }
}

struct UserTally {
  long long bits = 0;
  long long errors = 0;
};

std::vector<UserTally> simulate_chunk(const ScenarioConfig& cfg,
                                      const SchemeAssets& as, double ps,
                                      double n0, std::uint64_t snr_idx,
                                      std::uint64_t chunk) {
  const int nu = cfg.user_count;
  RngStream bits_rng(cfg.seed, snr_idx, chunk, kPurposeBits);
  RngStream gains_rng(cfg.seed, snr_idx, chunk, kPurposeGains);
  RngStream csi_rng(cfg.seed, snr_idx, chunk, kPurposeCsi);
  RngStream noise_rng(cfg.seed, snr_idx, chunk, kPurposeNoise);

  const PowerProfile prof = PowerProfile::make(ps, cfg.alphas);
  SicOptions opt;
  opt.residual_rho = cfg.residual_rho;

  std::vector<const Constellation*> layer_ptrs;
  if (cfg.scheme == Scheme::tnoma)
    for (const auto& c : as.per_user) layer_ptrs.push_back(&c);

  std::vector<UserTally> tally(nu);
  std::vector<int> truth(nu);
  std::vector<std::complex<double>> symbols(nu);

  for (int b = 0; b < cfg.chunk_blocks; ++b) {
    std::complex<double> x{0.0, 0.0};
    switch (cfg.scheme) {
      case Scheme::tnoma:
        for (int u = 0; u < nu; ++u) {
          truth[u] = int(bits_rng.below(std::uint32_t(as.per_user[u].size())));
          x += prof.layer_scale(u) * as.per_user[u].points[truth[u]];
        }
        break;
      case Scheme::hnoma: {
        for (int u = 0; u < nu; ++u) truth[u] = bits_rng.bit();
        x = hnoma_encode_block(truth, prof, as.h, as.levels);
        break;
      }
      case Scheme::unoma:
        for (int u = 0; u < nu; ++u) {
          truth[u] = int(bits_rng.below(std::uint32_t(as.qam.size())));
          symbols[u] = as.qam.points[truth[u]];
        }
        x = unoma_encode_block(symbols, prof, as.h);
        break;
    }

    for (int u = 0; u < nu; ++u) {
      std::complex<double> g, g_hat;
      switch (cfg.fading) {
        case FadingModel::rayleigh: {
          const ChannelRealization cr = imperfect_csi_split(
              cfg.distances[u], cfg.path_loss_exponent, cfg.sigma_e2, csi_rng,
              cfg.csi_mode);
          g = kUnitFadingPower * cr.g;
          g_hat = kUnitFadingPower * cr.g_hat;
          break;
        }
        case FadingModel::nakagami:
          g = nakagami_gain(cfg.distances[u], cfg.path_loss_exponent,
                            cfg.nakagami_m, gains_rng);
          g_hat = g;
          break;
        case FadingModel::awgn:
          g = std::pow(cfg.distances[u], -0.5 * cfg.path_loss_exponent);
          g_hat = g;
          break;
      }
      const std::complex<double> y = g * x + awgn_sample(n0, noise_rng);

      int wrong = 0;
      switch (cfg.scheme) {
        case Scheme::tnoma: {
          const SicReport rep =
              sic_decode(y, g_hat, prof, layer_ptrs, std::size_t(u) + 1, opt);
          wrong = std::popcount(
              std::uint32_t(rep.labels[u] ^ truth[u]) &
              std::uint32_t(as.per_user[u].size() - 1));
          break;
        }
        case Scheme::hnoma: {
          const HnomaBlockResult res =
              hnoma_decode_block(y, g_hat, prof, as.h, as.levels,
                                 cfg.hnoma_soft_combine, opt);
          wrong = res.bits[u] != truth[u] ? 1 : 0;
          break;
        }
        case Scheme::unoma: {
          const UnomaBlockResult res =
              unoma_decode_block(y, g_hat, prof, as.ctx, opt);
          wrong = std::popcount(std::uint32_t(res.labels[u] ^ truth[u]) &
                                std::uint32_t(as.qam.size() - 1));
          break;
        }
      }
      tally[u].bits += as.bits_per_user[u];
      tally[u].errors += wrong;
    }
  }
  return tally;
}

bool all_done(const std::vector<UserTally>& t, const StopRule& stop) {
  for (const UserTally& u : t)
    if (u.errors < stop.min_errors && u.bits < stop.max_bits) return false;
  return true;
}

double binom_cdf_low(long long k, long long n, double p) {
  // sum of the first k+1 binomial terms in log space; k stays small here
  if (k < 0) return 0.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return k >= n ? 1.0 : 0.0;
  const double lgn = std::lgamma(double(n) + 1.0);
  double acc = 0.0;
  for (long long i = 0; i <= k; ++i) {
    const double lg = lgn - std::lgamma(double(i) + 1.0) -
                      std::lgamma(double(n - i) + 1.0) +
                      double(i) * std::log(p) +
                      double(n - i) * std::log1p(-p);
    acc += std::exp(lg);
  }
  return std::min(1.0, acc);
}

// invert the binomial tail by bisection: smallest/largest p hitting the
// 2.5% tail mass on each side
double exact_upper(long long e, long long n) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binom_cdf_low(e, n, mid) > 0.025 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double exact_lower(long long e, long long n) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binom_cdf_low(e - 1, n, mid) > 0.975 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::tnoma: return "tnoma";
    case Scheme::hnoma: return "hnoma";
    case Scheme::unoma: return "unoma";
  }
  return "?";
}

const char* fading_name(FadingModel f) {
  switch (f) {
    case FadingModel::rayleigh: return "rayleigh";
    case FadingModel::nakagami: return "nakagami";
    case FadingModel::awgn: return "awgn";
  }
  return "?";
}

void validate_scenario(const ScenarioConfig& cfg) {
  std::string err;
  auto add = [&err](const std::string& m) {
    if (!err.empty()) err += "; ";
    err += m;
  };
  const int nu = cfg.user_count;
  if (nu < 1) add("user count must be >= 1");

  if (int(cfg.distances.size()) != nu) {
    add("distances must list one entry per user");
  } else {
    for (double d : cfg.distances)
      if (!(d > 0.0)) {
        add("distances must be > 0");
        break;
      }
    if (!std::is_sorted(cfg.distances.rbegin(), cfg.distances.rend()))
      add("distances must be nonincreasing (user 1 farthest)");
  }
  if (!(cfg.path_loss_exponent >= 0.0)) add("path loss exponent must be >= 0");

  if (int(cfg.alphas.size()) != nu) {
    add("alphas must list one entry per user");
  } else {
    try {
      PowerProfile::make(1.0, cfg.alphas);
    } catch (const std::invalid_argument& e) {
      add(e.what());
    }
  }

  auto square_order = [](int m) { return m == 4 || m == 16 || m == 64; };
  switch (cfg.scheme) {
    case Scheme::tnoma:
      if (int(cfg.modulation_orders.size()) != nu) {
        add("modulation orders must list one entry per user");
      } else {
        for (int m : cfg.modulation_orders)
          if (m != 2 && !square_order(m)) {
            add("modulation orders must be 2, 4, 16, or 64");
            break;
          }
      }
      break;
    case Scheme::hnoma:
      if (!power_of_two(nu)) add("user count must be a power of two");
      if (cfg.hnoma_soft_combine && cfg.hnoma_ring_levels)
        add("soft level combining requires the real-valued level alphabet");
      break;
    case Scheme::unoma:
      if (!power_of_two(nu) || nu > 8)
        add("user count must be a power of two at most 8");
      if (cfg.modulation_orders.empty() ||
          std::count(cfg.modulation_orders.begin(),
                     cfg.modulation_orders.end(),
                     cfg.modulation_orders[0]) !=
              long(cfg.modulation_orders.size()) ||
          !square_order(cfg.modulation_orders[0]))
        add("unitary mixing needs one shared square QAM order (4, 16, or 64)");
      break;
  }

  if (!(cfg.sigma_e2 >= 0.0 && cfg.sigma_e2 <= 1.0))
    add("sigma_e2 must lie in [0, 1]");
  if (cfg.fading != FadingModel::rayleigh && cfg.sigma_e2 > 0.0)
    add("channel-estimate error is modeled for rayleigh fading only");
  if (cfg.fading == FadingModel::nakagami && !(cfg.nakagami_m >= 0.5))
    add("nakagami shape must be >= 0.5");
  if (!(cfg.residual_rho >= 0.0 && cfg.residual_rho <= 1.0))
    add("residual rho must lie in [0, 1]");
  if (cfg.snr_grid_db.empty()) add("SNR grid must not be empty");
  for (double db : cfg.snr_grid_db)
    if (!std::isfinite(db)) {
      add("SNR grid entries must be finite");
      break;
    }
  if (!(cfg.bandwidth_hz > 0.0)) add("bandwidth must be > 0");
  if (cfg.stop.min_errors < 1) add("stop rule needs min_errors >= 1");
  if (cfg.stop.max_bits < 1) add("stop rule needs max_bits >= 1");
  if (cfg.workers < 1) add("worker count must be >= 1");
  if (cfg.chunk_blocks < 1) add("chunk size must be >= 1");
  if (!err.empty()) throw std::invalid_argument("invalid scenario: " + err);
}

std::pair<double, double> confidence_interval95(long long errors,
                                                long long bits) {
  if (bits <= 0) return {0.0, 1.0};
  const double p = double(errors) / double(bits);
  if (errors >= 30 && bits - errors >= 30) {
    const double se = std::sqrt(p * (1.0 - p) / double(bits));
    return {std::max(0.0, p - 1.96 * se), std::min(1.0, p + 1.96 * se)};
  }
  const double lo = errors == 0 ? 0.0 : exact_lower(errors, bits);
  const double hi = errors == bits ? 1.0 : exact_upper(errors, bits);
  return {lo, hi};
}

std::vector<BerCurve> run_scenario(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  SchemeAssets as;
  prepare_assets(cfg, as);
  const double n0 = noise_from_bandwidth(cfg.bandwidth_hz).n0_linear;
  const int nu = cfg.user_count;

  std::vector<BerCurve> out(nu);
  for (int u = 0; u < nu; ++u) out[u].user = u + 1;

  for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
    const double db = cfg.snr_grid_db[si];
    const double ps = n0 * std::pow(10.0, db / 10.0);
    std::vector<UserTally> total(nu);
    std::uint64_t next_chunk = 0;
    bool done = false;
    while (!done) {
      const int wave = std::max(1, cfg.workers);
      std::vector<std::vector<UserTally>> res(wave);
      if (wave == 1) {
        res[0] = simulate_chunk(cfg, as, ps, n0, si, next_chunk);
      } else {
        std::vector<std::thread> pool;
        pool.reserve(wave);
        for (int w = 0; w < wave; ++w)
          pool.emplace_back([&, w] {
            res[w] = simulate_chunk(cfg, as, ps, n0, si, next_chunk + w);
          });
        for (auto& t : pool) t.join();
      }
      // fold in chunk order so the stopping chunk is worker-count neutral
      for (int w = 0; w < wave && !done; ++w) {
        for (int u = 0; u < nu; ++u) {
          total[u].bits += res[w][u].bits;
          total[u].errors += res[w][u].errors;
        }
        done = all_done(total, cfg.stop);
      }
      next_chunk += std::uint64_t(wave);
    }
    for (int u = 0; u < nu; ++u) {
      BerPoint pt;
      pt.snr_db = db;
      pt.bits = total[u].bits;
      pt.errors = total[u].errors;
      pt.ber = double(total[u].errors) / double(total[u].bits);
      const auto ci = confidence_interval95(total[u].errors, total[u].bits);
      pt.ci_low = ci.first;
      pt.ci_high = ci.second;
      out[u].points.push_back(pt);
    }
  }
  return out;
}

double snr_at_ber(const std::vector<BerPoint>& points, double target) {
  if (!(target > 0.0) || !std::isfinite(target))
    throw std::domain_error("target BER must be positive and finite");
  auto eff = [](const BerPoint& p) {
    if (p.errors > 0) return p.ber;
    return p.bits > 0 ? 0.5 / double(p.bits) : 1.0;
  };
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = eff(points[i]), b = eff(points[i + 1]);
    if (a >= target && target >= b) {
      if (a == b) return points[i].snr_db;
      const double la = std::log10(a), lb = std::log10(b);
      const double lt = std::log10(target);
      return points[i].snr_db +
             (points[i + 1].snr_db - points[i].snr_db) * (lt - la) / (lb - la);
    }
  }
  std::ostringstream os;
  os << "target BER " << target << " is not bracketed by the curve";
  throw std::domain_error(os.str());
}

SchemeComparison compare_schemes(const ScenarioConfig& base,
                                 const std::vector<Scheme>& schemes,
                                 double target_ber) {
  if (schemes.empty())
    throw std::invalid_argument("schemes list must not be empty");
  SchemeComparison out;
  out.schemes = schemes;
  out.target_ber = target_ber;
  for (Scheme s : schemes) {
    ScenarioConfig c = base;
    c.scheme = s;
    out.curves.push_back(run_scenario(c));
  }

  const auto& ref = out.curves.front();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t si = 0; si < schemes.size(); ++si) {
    std::vector<std::vector<double>> deltas;
    std::vector<double> gains;
    for (std::size_t u = 0; u < ref.size(); ++u) {
      std::vector<double> d;
      for (std::size_t k = 0; k < ref[u].points.size(); ++k)
        d.push_back(out.curves[si][u].points[k].ber - ref[u].points[k].ber);
      deltas.push_back(std::move(d));
      double gain = nan;
      try {
        const double s0 = snr_at_ber(ref[u].points, target_ber);
        const double s1 = snr_at_ber(out.curves[si][u].points, target_ber);
        gain = s0 - s1;
      } catch (const std::domain_error&) {
      }
      gains.push_back(gain);
    }
    out.delta_vs_first.push_back(std::move(deltas));
    out.snr_gain_vs_first.push_back(std::move(gains));
  }
  return out;
}

std::string ber_curves_csv(
    const std::vector<std::pair<std::string, std::vector<BerCurve>>>& runs) {
  std::ostringstream os;
  os.precision(10);
  os << "scheme,user,snr_db,bits,errors,ber,ci_low,ci_high\n";
  for (const auto& [label, curves] : runs)
    for (const BerCurve& c : curves)
      for (const BerPoint& p : c.points)
        os << label << ',' << c.user << ',' << p.snr_db << ',' << p.bits << ','
           << p.errors << ',' << p.ber << ',' << p.ci_low << ',' << p.ci_high
           << '\n';
  return os.str();
}

}  // namespace hnoma
