#pragma once

#include <complex>
#include <vector>

#include "hnoma/rng.hpp"

namespace hnoma {

// How the estimate/error split scales with sigma_e2. The literal mode puts
// (1 - sigma_e2) and sigma_e2 directly on the standard deviations; the
// variance-consistent mode uses sqrt factors so the recombined gain keeps a
// sigma_e2-independent variance.
enum class CsiMode { literal, variance_consistent };

struct ChannelRealization {
  std::complex<double> g;        // true gain, always g_hat + g_tilde
  std::complex<double> g_hat;    // what the receiver knows
  std::complex<double> g_tilde;  // estimation error
  double distance = 1.0;
  double exponent = 2.0;
  double sigma_e2 = 0.0;
};

struct NoiseSpec {
  double bandwidth_hz = 0.0;
  double n0_dbm = 0.0;
  double n0_linear = 0.0;  // watts
};

// sqrt(distance^-exponent) * h with h ~ CN(0,1).
std::complex<double> rayleigh_gain(double distance, double exponent,
                                   RngStream& rng);

// Envelope^2 ~ Gamma(m, Omega/m) with Omega = distance^-exponent, phase
// uniform; m = 1 reduces to the Rayleigh law.
std::complex<double> nakagami_gain(double distance, double exponent,
                                   double m_shape, RngStream& rng);

ChannelRealization imperfect_csi_split(double distance, double exponent,
                                       double sigma_e2, RngStream& rng,
                                       CsiMode mode = CsiMode::literal);

// Adds i.i.d. CN(0, n0_linear) in place; n0_linear = 0 leaves samples
// untouched bit-exactly.
void awgn(std::vector<std::complex<double>>& samples, double n0_linear,
          RngStream& rng);
std::complex<double> awgn_sample(double n0_linear, RngStream& rng);

// Thermal noise density at 290 K: N0_dBm = -174 + 10*log10(B).
NoiseSpec noise_from_bandwidth(double b_hz);

}  // namespace hnoma
