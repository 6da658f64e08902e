#pragma once

#include <utility>
#include <vector>

namespace hnoma {

/*
 * Closed-form BER machinery for the two-user superposition downlink.
 *
 * Everything is expressed per axis of a square-QAM pair: user 1 (far, more
 * power) decodes its own symbol treating user 2 as extra signal; user 2
 * (near) first decides and subtracts user 1, then decodes itself.  Both
 * chains reduce to sums of Gaussian tail probabilities whose arguments scale
 * with sqrt(2*gamma), gamma being the instantaneous post-path-loss SNR, so
 * curves are represented as lists of (coefficient, threshold) pairs that can
 * be evaluated at a fixed gamma or averaged over Rayleigh fading in closed
 * form.
 */

struct AnalyticConfig {
  int m1 = 4;            // square QAM order, user 1 (far)
  int m2 = 4;            // square QAM order, user 2 (near)
  double alpha1 = 0.7;   // power fraction, user 1
  double alpha2 = 0.3;   // power fraction, user 2
  double q1 = 6.015;     // distance, user 1
  double q2 = 1.0;       // distance, user 2
  double zeta = 2.0;     // path-loss exponent
  double e1 = 2.0;       // mean alphabet energy before normalization, user 1
  double e2 = 2.0;       // same for user 2
  std::vector<double> es_over_n0_db_grid;
};

// 2(M-1)/3, the mean energy of the odd-integer square-QAM alphabet
double default_alphabet_energy(int m);

// throws std::invalid_argument listing every violation at once
void validate_analytic_config(const AnalyticConfig& cfg);

// Gaussian tail probability, 0.5*erfc(x/sqrt(2))
double q_function(double x);

// The +/- pair of tail arguments sqrt(2*gamma)*(a*sqrt(alpha1/E1) +/-
// b*sqrt(alpha2/E2)).  gamma already includes path loss, so no distance
// factor is applied here.
std::pair<double, double> g_pm(double a, double b, const AnalyticConfig& cfg,
                               double gamma);

/*
 * P(gamma) = constant + sum_j coef_j * Q(sqrt(2*gamma) * t_j).
 * Thresholds may be +/-infinity (Q -> 0 or 1 regardless of gamma).
 */
struct QTerm {
  double coef = 0.0;
  double t = 0.0;
};

struct QTermSum {
  double constant = 0.0;
  std::vector<QTerm> terms;

  double eval(double gamma) const;
  // expectation under gamma ~ Exponential(mean gbar); halved_pc selects the
  // exact tail average (default) or the doubled bookkeeping variant
  double rayleigh_average(double gbar, bool halved_pc = true) const;
};

// E[Q(sqrt(2*gamma)*t)] for gamma ~ Exponential(mean gbar)
double rayleigh_q_average(double t, double gbar);

// Exact per-axis bit error terms for bit position k (1 = most significant
// per-axis Gray bit, k in 1..log2 sqrt(M)).
QTermSum user1_bit_terms(const AnalyticConfig& cfg, int k);
QTermSum user2_bit_terms(const AnalyticConfig& cfg, int k);

// Conditional BER at instantaneous post-path-loss SNR gamma.
double user1_conditional_ber(const AnalyticConfig& cfg, double gamma, int k);
double user2_conditional_ber(const AnalyticConfig& cfg, double gamma, int k);

// Averages over Rayleigh fading.  User 1 integrates the conditional curve
// against the exponential SNR density by adaptive quadrature (throws
// std::runtime_error with diagnostics if it fails to converge); the _closed
// variant sums the termwise tail averages and exists as a cross-check.
// User 2 averages termwise.  gbar is the mean post-path-loss SNR of that
// user; both include the average over bit positions.
double user1_average_ber(const AnalyticConfig& cfg, double gbar);
double user1_average_ber_closed(const AnalyticConfig& cfg, double gbar);
double user2_average_ber(const AnalyticConfig& cfg, double gbar,
                         bool halved_pc = true);
double user2_average_bit_ber(const AnalyticConfig& cfg, double gbar, int k,
                             bool halved_pc = true);

struct BerCurvePoint {
  double snr_db = 0.0;
  double ber_user1 = 0.0;
  double ber_user2 = 0.0;
};

// One point per grid entry; gbar_k = q_k^-zeta * 10^(dB/10).
std::vector<BerCurvePoint> analytic_ber_curve(const AnalyticConfig& cfg);

}  // namespace hnoma
