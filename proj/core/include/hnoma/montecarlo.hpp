#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hnoma/channel.hpp"

namespace hnoma {

enum class Scheme { tnoma, hnoma, unoma };
enum class FadingModel { rayleigh, nakagami, awgn };

const char* scheme_name(Scheme s);
const char* fading_name(FadingModel f);

struct StopRule {
  long long min_errors = 200;     // per user per SNR point
  long long max_bits = 100000000; // per user per SNR point
};

/*
 * One BER experiment: a scheme, a user geometry, a power split, and an SNR
 * sweep.  The SNR axis is transmit Es/N0: N0 is fixed by the bandwidth and
 * the total transmit power is scaled per grid point.
 */
struct ScenarioConfig {
  Scheme scheme = Scheme::tnoma;
  int user_count = 2;
  std::vector<double> distances;  // nonincreasing: user 1 is farthest
  double path_loss_exponent = 2.0;
  std::vector<double> alphas;     // PowerProfile ordering rules apply
  // per-user square QAM orders for the layered scheme (2 = one-bit binary
  // levels); single shared order for the unitary-mixing scheme; unused by
  // the transform-domain scheme, whose alphabet is fixed by the user count
  std::vector<int> modulation_orders;
  bool hnoma_ring_levels = false;
  bool hnoma_soft_combine = false;
  double sigma_e2 = 0.0;  // channel-estimate error power, 0 = perfect CSI
  CsiMode csi_mode = CsiMode::literal;
  double residual_rho = 0.0;  // fraction of decided layers left unsubtracted
  std::vector<double> snr_grid_db;
  std::uint64_t seed = 1;
  StopRule stop;
  FadingModel fading = FadingModel::rayleigh;
  double nakagami_m = 1.0;
  double bandwidth_hz = 1e6;
  int workers = 1;
  int chunk_blocks = 2048;  // scheduling quantum; part of the result identity
};

// throws std::invalid_argument listing every violated invariant
void validate_scenario(const ScenarioConfig& cfg);

struct BerPoint {
  double snr_db = 0.0;
  long long bits = 0;
  long long errors = 0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct BerCurve {
  int user = 1;  // 1-based, user 1 = farthest
  std::vector<BerPoint> points;
};

/*
 * Runs blocks through transmit -> channel -> receive at every SNR point
 * until each user has min_errors errors or max_bits bits.  Blocks are
 * simulated in fixed-size chunks whose random streams are keyed by
 * (seed, snr index, chunk index, purpose), and chunk results are folded in
 * chunk order, so the output is bit-identical for any worker count.
 */
std::vector<BerCurve> run_scenario(const ScenarioConfig& cfg);

// 95% interval: normal approximation, switched to exact binomial
// (Clopper-Pearson) tails when fewer than 30 errors were seen
std::pair<double, double> confidence_interval95(long long errors,
                                                long long bits);

// log10(BER)-linear interpolation on a nonincreasing curve; zero-error
// points count as half an error.  Throws std::domain_error when the target
// is not bracketed.
double snr_at_ber(const std::vector<BerPoint>& points, double target);

/*
 * Same geometry and seed across schemes: channel, CSI, and noise streams do
 * not key on the scheme, so every scheme sees identical realizations.
 */
struct SchemeComparison {
  std::vector<Scheme> schemes;
  std::vector<std::vector<BerCurve>> curves;  // [scheme][user]
  // ber(scheme) - ber(first scheme), per user per grid point
  std::vector<std::vector<std::vector<double>>> delta_vs_first;
  // snr_at_ber(first) - snr_at_ber(scheme) at target_ber; positive means the
  // scheme reaches the target earlier than the first; NaN if not bracketed
  std::vector<std::vector<double>> snr_gain_vs_first;
  double target_ber = 1e-2;
};

SchemeComparison compare_schemes(const ScenarioConfig& base,
                                 const std::vector<Scheme>& schemes,
                                 double target_ber = 1e-2);

// scheme,user,snr_db,bits,errors,ber,ci_low,ci_high rows for one or more
// labeled runs
std::string ber_curves_csv(
    const std::vector<std::pair<std::string, std::vector<BerCurve>>>& runs);

}  // namespace hnoma
