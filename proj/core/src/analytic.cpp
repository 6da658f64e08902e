#include "hnoma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnoma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool power_of_four(int m) {
  if (m < 4) return false;
  while (m % 4 == 0) m /= 4;
  return m == 1;
}

int int_sqrt(int m) { return int(std::lround(std::sqrt(double(m)))); }

int int_log2(int m) { return int(std::lround(std::log2(double(m)))); }

/*
 * Fold a raw (constant, term list) pair into canonical form: thresholds
 * strictly positive and deduplicated.  Negative and infinite thresholds are
 * rewritten through Q(-x) = 1 - Q(x), so evaluation and fading averages only
 * ever see decaying tails.
 */
QTermSum consolidate(double constant, std::vector<QTerm> raw) {
  QTermSum out;
  out.constant = constant;
  std::vector<QTerm> pos;
  for (const QTerm& tm : raw) {
    if (tm.coef == 0.0) continue;
    if (std::isinf(tm.t)) {
      if (tm.t < 0.0) out.constant += tm.coef;
      continue;
    }
    if (tm.t < 0.0) {
      out.constant += tm.coef;
      pos.push_back({-tm.coef, -tm.t});
    } else if (tm.t == 0.0) {
      out.constant += 0.5 * tm.coef;
    } else {
      pos.push_back(tm);
    }
  }
  std::sort(pos.begin(), pos.end(),
            [](const QTerm& a, const QTerm& b) { return a.t < b.t; });
  for (const QTerm& tm : pos) {
    if (!out.terms.empty() &&
        std::fabs(tm.t - out.terms.back().t) <= 1e-12 * (1.0 + tm.t))
      out.terms.back().coef += tm.coef;
    else
      out.terms.push_back(tm);
  }
  out.terms.erase(std::remove_if(out.terms.begin(), out.terms.end(),
                                 [](const QTerm& tm) {
                                   return std::fabs(tm.coef) < 1e-15;
                                 }),
                  out.terms.end());
  return out;
}

void check_bit_position(int k, int v) {
  if (k < 1 || k > v)
    throw std::invalid_argument("bit position must lie in 1.." +
                                std::to_string(v) + ", got " +
                                std::to_string(k));
}

struct AxisScales {
  int sq1, sq2, v1, v2;
  double a1, a2;
};

AxisScales axis_scales(const AnalyticConfig& cfg) {
  AxisScales ax;
  ax.sq1 = int_sqrt(cfg.m1);
  ax.sq2 = int_sqrt(cfg.m2);
  ax.v1 = int_log2(ax.sq1);
  ax.v2 = int_log2(ax.sq2);
  ax.a1 = std::sqrt(cfg.alpha1 / cfg.e1);
  ax.a2 = std::sqrt(cfg.alpha2 / cfg.e2);
  return ax;
}

// 15-point Kronrod rule with embedded 7-point Gauss estimate (QUADPACK
// abscissae); err receives |K15 - G7|
template <class F>
double gk15(F&& f, double a, double b, double& err, long& evals) {
  static const double xgk[8] = {
      0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
      0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
      0.2077849550078985, 0.0};
  static const double wgk[8] = {
      0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
      0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
      0.2044329400752989, 0.2094821410847278};
  static const double wg[4] = {0.1294849661688697, 0.2797053914892767,
                               0.3818300505051189, 0.4179591836734694};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * xgk[i]);
    fv[14 - i] = f(c + h * xgk[i]);
  }
  fv[7] = f(c);
  evals += 15;
  double k15 = wgk[7] * fv[7], g7 = wg[3] * fv[7];
  for (int i = 0; i < 7; ++i) k15 += wgk[i] * (fv[i] + fv[14 - i]);
  for (int j = 0; j < 3; ++j) {
    const int i = 2 * j + 1;
    g7 += wg[j] * (fv[i] + fv[14 - i]);
  }
  k15 *= h;
  g7 *= h;
  err = std::fabs(k15 - g7);
  return k15;
}

template <class F>
double adaptive_quadrature(F&& f, double a, double b, double reltol) {
  struct Seg {
    double lo, hi, tol;
    int depth;
  };
  double err0 = 0.0;
  long evals = 0;
  const double whole = gk15(f, a, b, err0, evals);
  const double tol = std::max(std::fabs(whole) * reltol, 1e-14);

  std::vector<Seg> work{{a, b, tol, 0}};
  double total = 0.0, leftover = 0.0;
  while (!work.empty()) {
    const Seg seg = work.back();
    work.pop_back();
    double err = 0.0;
    const double val = gk15(f, seg.lo, seg.hi, err, evals);
    if (err <= seg.tol || seg.depth >= 60) {
      total += val;
      if (err > seg.tol) leftover += err;
      continue;
    }
    if (evals > 2000000)
      throw std::runtime_error(
          "quadrature failed to converge: over " + std::to_string(evals) +
          " evaluations on [" + std::to_string(a) + ", " + std::to_string(b) +
          "]");
    const double mid = 0.5 * (seg.lo + seg.hi);
    work.push_back({seg.lo, mid, 0.5 * seg.tol, seg.depth + 1});
    work.push_back({mid, seg.hi, 0.5 * seg.tol, seg.depth + 1});
  }
  if (leftover > std::max(10.0 * tol, 1e-10))
    throw std::runtime_error(
        "quadrature failed to converge: residual error " +
        std::to_string(leftover) + " after " + std::to_string(evals) +
        " evaluations, tolerance " + std::to_string(tol));
  return total;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

double default_alphabet_energy(int m) { return 2.0 * (m - 1) / 3.0; }

void validate_analytic_config(const AnalyticConfig& cfg) {
  std::string err;
  auto add = [&err](const std::string& m) {
    if (!err.empty()) err += "; ";
    err += m;
  };
  if (!power_of_four(cfg.m1)) add("m1 must be a power of 4 (square QAM)");
  if (!power_of_four(cfg.m2)) add("m2 must be a power of 4 (square QAM)");
  if (!(cfg.alpha1 > 0.0) || !(cfg.alpha2 > 0.0))
    add("power fractions must be > 0");
  else if (std::fabs(cfg.alpha1 + cfg.alpha2 - 1.0) > 1e-12)
    add("power fractions must sum to 1");
  if (cfg.alpha1 <= cfg.alpha2) add("alpha1 must exceed alpha2");
  if (!(cfg.q1 > 0.0) || !(cfg.q2 > 0.0)) add("distances must be > 0");
  if (cfg.zeta < 0.0) add("path-loss exponent must be >= 0");
  if (!(cfg.e1 > 0.0) || !(cfg.e2 > 0.0))
    add("alphabet energy values must be > 0");
  for (double db : cfg.es_over_n0_db_grid)
    if (!std::isfinite(db)) {
      add("SNR grid entries must be finite");
      break;
    }
  if (!err.empty()) throw std::invalid_argument("invalid config: " + err);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::pair<double, double> g_pm(double a, double b, const AnalyticConfig& cfg,
                               double gamma) {
  const double eps = std::sqrt(2.0 * gamma);
  const double u = a * std::sqrt(cfg.alpha1 / cfg.e1);
  const double v = b * std::sqrt(cfg.alpha2 / cfg.e2);
  return {eps * (u + v), eps * (u - v)};
}

double QTermSum::eval(double gamma) const {
  double p = constant;
  const double eps = std::sqrt(2.0 * gamma);
  for (const QTerm& tm : terms) p += tm.coef * q_function(eps * tm.t);
  return p;
}

double rayleigh_q_average(double t, double gbar) {
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0.0 ? 0.0 : 1.0;
  const double r = t * t * gbar;
  const double base = 0.5 * (1.0 - std::sqrt(r / (r + 1.0)));
  return t > 0.0 ? base : 1.0 - base;
}

double QTermSum::rayleigh_average(double gbar, bool halved_pc) const {
  const double w = halved_pc ? 1.0 : 2.0;
  double p = constant;
  for (const QTerm& tm : terms)
    p += tm.coef * w * rayleigh_q_average(tm.t, gbar);
  return p;
}

QTermSum user1_bit_terms(const AnalyticConfig& cfg, int k) {
  const AxisScales ax = axis_scales(cfg);
  check_bit_position(k, ax.v1);
  const int upper = ax.sq1 - (ax.sq1 >> k) - 1;
  std::vector<QTerm> raw;
  const double coef_unit = 2.0 / (double(ax.sq1) * ax.sq2);
  for (int i = 0; i <= upper; ++i) {
    const int num = i << (k - 1);
    const int sign = (num / ax.sq1) % 2 == 0 ? 1 : -1;
    const int mag = (1 << (k - 1)) - (2 * num + ax.sq1) / (2 * ax.sq1);
    const double d1 = double(sign * mag);
    if (d1 == 0.0) continue;
    for (int l = 0; l < ax.sq2; ++l) {
      const double t = (2 * i + 1) * ax.a1 + (2 * l - ax.sq2 + 1) * ax.a2;
      raw.push_back({coef_unit * d1, t});
    }
  }
  return consolidate(0.0, std::move(raw));
}

QTermSum user2_bit_terms(const AnalyticConfig& cfg, int k) {
  const AxisScales ax = axis_scales(cfg);
  check_bit_position(k, ax.v2);

  std::vector<double> lv1(ax.sq1), lv2(ax.sq2);
  for (int i = 0; i < ax.sq1; ++i) lv1[i] = (2 * i - ax.sq1 + 1) * ax.a1;
  for (int i = 0; i < ax.sq2; ++i) lv2[i] = (2 * i - ax.sq2 + 1) * ax.a2;
  std::vector<double> b1{-kInf}, b2{-kInf};
  for (int i = 1; i < ax.sq1; ++i) b1.push_back((2 * i - ax.sq1) * ax.a1);
  b1.push_back(kInf);
  for (int i = 1; i < ax.sq2; ++i) b2.push_back((2 * i - ax.sq2) * ax.a2);
  b2.push_back(kInf);

  auto graybit = [](int idx, int v, int pos) {
    const int g = idx ^ (idx >> 1);
    return (g >> (v - pos)) & 1;
  };

  const double unit = 1.0 / (double(ax.sq1) * ax.sq2);
  double constant = 0.0;
  std::vector<QTerm> raw;
  // first stage decides a cell of the strong alphabet, its level is
  // subtracted, the second stage slices what remains; every joint event is
  // an interval intersection in the received coordinate
  for (int m1 = 0; m1 < ax.sq1; ++m1)
    for (int m2 = 0; m2 < ax.sq2; ++m2) {
      const double s = lv1[m1] + lv2[m2];
      for (int i = 0; i < ax.sq1; ++i) {
        const double shift = lv1[i];
        for (int j = 0; j < ax.sq2; ++j) {
          if (graybit(j, ax.v2, k) == graybit(m2, ax.v2, k)) continue;
          const double lo = std::max(b1[i], shift + b2[j]);
          const double hi = std::min(b1[i + 1], shift + b2[j + 1]);
          if (!(lo < hi)) continue;
          raw.push_back({unit, lo - s});
          raw.push_back({-unit, hi - s});
        }
      }
    }
  return consolidate(constant, std::move(raw));
}

double user1_conditional_ber(const AnalyticConfig& cfg, double gamma, int k) {
  if (!(gamma >= 0.0))
    throw std::invalid_argument("instantaneous SNR must be >= 0");
  return clamp01(user1_bit_terms(cfg, k).eval(gamma));
}

double user2_conditional_ber(const AnalyticConfig& cfg, double gamma, int k) {
  if (!(gamma >= 0.0))
    throw std::invalid_argument("instantaneous SNR must be >= 0");
  return clamp01(user2_bit_terms(cfg, k).eval(gamma));
}

double user1_average_ber(const AnalyticConfig& cfg, double gbar) {
  if (!(gbar >= 0.0)) throw std::invalid_argument("mean SNR must be >= 0");
  const AxisScales ax = axis_scales(cfg);
  double sum = 0.0;
  for (int k = 1; k <= ax.v1; ++k) {
    const QTermSum ts = user1_bit_terms(cfg, k);
    // substitute u = exp(-gamma/gbar), mapping the fading average onto (0,1)
    sum += adaptive_quadrature(
        [&](double u) { return ts.eval(-gbar * std::log(u)); }, 0.0, 1.0,
        1e-8);
  }
  return clamp01(sum / ax.v1);
}

double user1_average_ber_closed(const AnalyticConfig& cfg, double gbar) {
  if (!(gbar >= 0.0)) throw std::invalid_argument("mean SNR must be >= 0");
  const AxisScales ax = axis_scales(cfg);
  double sum = 0.0;
  for (int k = 1; k <= ax.v1; ++k)
    sum += user1_bit_terms(cfg, k).rayleigh_average(gbar);
  return clamp01(sum / ax.v1);
}

double user2_average_bit_ber(const AnalyticConfig& cfg, double gbar, int k,
                             bool halved_pc) {
  if (!(gbar >= 0.0)) throw std::invalid_argument("mean SNR must be >= 0");
  return clamp01(user2_bit_terms(cfg, k).rayleigh_average(gbar, halved_pc));
}

double user2_average_ber(const AnalyticConfig& cfg, double gbar,
                         bool halved_pc) {
  const AxisScales ax = axis_scales(cfg);
  double sum = 0.0;
  for (int k = 1; k <= ax.v2; ++k)
    sum += user2_average_bit_ber(cfg, gbar, k, halved_pc);
  return clamp01(sum / ax.v2);
}

std::vector<BerCurvePoint> analytic_ber_curve(const AnalyticConfig& cfg) {
  validate_analytic_config(cfg);
  std::vector<BerCurvePoint> out;
  out.reserve(cfg.es_over_n0_db_grid.size());
  for (double db : cfg.es_over_n0_db_grid) {
    const double esn0 = std::pow(10.0, db / 10.0);
    const double gbar1 = std::pow(cfg.q1, -cfg.zeta) * esn0;
    const double gbar2 = std::pow(cfg.q2, -cfg.zeta) * esn0;
    BerCurvePoint pt;
    pt.snr_db = db;
    pt.ber_user1 = user1_average_ber(cfg, gbar1);
    pt.ber_user2 = user2_average_ber(cfg, gbar2);
    out.push_back(pt);
  }
  return out;
}

}  // namespace hnoma
