#include "hnoma/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hnoma {

std::complex<double> rayleigh_gain(double distance, double exponent,
                                   RngStream& rng) {
  if (!(distance > 0.0))
    throw std::invalid_argument("rayleigh_gain needs distance > 0, got " +
                                std::to_string(distance));
  return std::sqrt(std::pow(distance, -exponent)) * rng.cn01();
}

std::complex<double> nakagami_gain(double distance, double exponent,
                                   double m_shape, RngStream& rng) {
  if (!(distance > 0.0))
    throw std::invalid_argument("nakagami_gain needs distance > 0, got " +
                                std::to_string(distance));
  if (!(m_shape >= 0.5))
    throw std::invalid_argument("nakagami shape must be >= 0.5, got " +
                                std::to_string(m_shape));
  const double omega = std::pow(distance, -exponent);
  const double power = rng.gamma(m_shape, omega / m_shape);
  const double phase = 2.0 * M_PI * rng.uniform();
  return std::sqrt(power) * std::complex<double>(std::cos(phase),
                                                 std::sin(phase));
}

ChannelRealization imperfect_csi_split(double distance, double exponent,
                                       double sigma_e2, RngStream& rng,
                                       CsiMode mode) {
  if (!(distance > 0.0))
    throw std::invalid_argument("imperfect_csi_split needs distance > 0");
  if (!(sigma_e2 >= 0.0 && sigma_e2 <= 1.0))
    throw std::invalid_argument("sigma_e2 must lie in [0, 1], got " +
                                std::to_string(sigma_e2));

  double f_hat, f_tilde;
  if (mode == CsiMode::literal) {
    f_hat = 1.0 - sigma_e2;
    f_tilde = sigma_e2;
  } else {
    f_hat = std::sqrt(1.0 - sigma_e2);
    f_tilde = std::sqrt(sigma_e2);
  }

  const double atten = std::sqrt(std::pow(distance, -exponent)) * M_SQRT1_2;
  ChannelRealization r;
  r.distance = distance;
  r.exponent = exponent;
  r.sigma_e2 = sigma_e2;
  // Draw both components even when one factor is zero so the consumed
  // stream positions do not depend on sigma_e2.
  const auto h_hat = rng.cn01();
  const auto h_tilde = rng.cn01();
  r.g_hat = f_hat * atten * h_hat;
  r.g_tilde = f_tilde * atten * h_tilde;
  r.g = r.g_hat + r.g_tilde;
  return r;
}

std::complex<double> awgn_sample(double n0_linear, RngStream& rng) {
  if (!(n0_linear >= 0.0))
    throw std::invalid_argument("noise variance must be >= 0, got " +
                                std::to_string(n0_linear));
  if (n0_linear == 0.0) return {0.0, 0.0};
  return std::sqrt(n0_linear) * rng.cn01();
}

void awgn(std::vector<std::complex<double>>& samples, double n0_linear,
          RngStream& rng) {
  if (!(n0_linear >= 0.0))
    throw std::invalid_argument("noise variance must be >= 0, got " +
                                std::to_string(n0_linear));
  if (n0_linear == 0.0) return;
  const double s = std::sqrt(n0_linear);
  for (auto& x : samples) x += s * rng.cn01();
}

NoiseSpec noise_from_bandwidth(double b_hz) {
  if (!(b_hz > 0.0))
    throw std::invalid_argument("bandwidth must be > 0, got " +
                                std::to_string(b_hz));
  NoiseSpec n;
  n.bandwidth_hz = b_hz;
  n.n0_dbm = -174.0 + 10.0 * std::log10(b_hz);
  n.n0_linear = std::pow(10.0, (n.n0_dbm - 30.0) / 10.0);
  return n;
}

}  // namespace hnoma
