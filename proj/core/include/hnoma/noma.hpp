#pragma once

#include <complex>
#include <vector>

#include "hnoma/hadamard.hpp"
#include "hnoma/modem.hpp"

namespace hnoma {

struct PowerProfile {
  double total_power = 1.0;           // Ps, linear watts
  std::vector<double> alphas;         // strictly decreasing, sums to 1

  // Validates every constraint and throws std::invalid_argument listing all
  // violations at once.
  static PowerProfile make(double total_power, std::vector<double> alphas);

  std::size_t layer_count() const { return alphas.size(); }
  // sqrt(Ps * alpha_k / E_k): amplitude applied to layer k's symbols.
  double layer_scale(std::size_t k, double energy_k = 1.0) const;
};

// Samplewise x = sum_k sqrt(Ps*alpha_k/E_k) * x_k. Layer k's declared
// per-alphabet mean energy E_k is passed explicitly so both unit-normalized
// and raw integer alphabets superpose to the same signal.
std::vector<std::complex<double>> superpose(
    const std::vector<std::vector<std::complex<double>>>& layers,
    const PowerProfile& p, const std::vector<double>& layer_energies);

struct SicOptions {
  // Fraction of a cancelled layer's power left behind: the subtraction uses
  // (1 - sqrt(rho)) of the reconstruction.
  double residual_rho = 0.0;
  // Per-layer label overrides for error-propagation studies; -1 = decide
  // normally. Empty = no overrides.
  std::vector<int> forced_decisions;
};

struct SicReport {
  std::vector<int> labels;                          // decoding order = layer order
  std::vector<std::complex<double>> pre_residuals;  // residual seen by each layer
  std::vector<char> forced;                         // 1 where a decision was injected
};

// Successive interference cancellation on one received sample: decode layers
// in decreasing-power order, reconstruct with the receiver's gain estimate,
// subtract, continue through layer `upto_layer` (1-based, 0 = all layers).
SicReport sic_decode(std::complex<double> y, std::complex<double> g_hat,
                     const PowerProfile& p,
                     const std::vector<const Constellation*>& layer_alphabets,
                     std::size_t upto_layer = 0, const SicOptions& opt = {});

// Streamwise wrapper: per-sample SIC with a decision for layers 1..own_layer.
std::vector<SicReport> tnoma_sic_receive(
    const std::vector<std::complex<double>>& y, std::complex<double> g_hat,
    const PowerProfile& p,
    const std::vector<const Constellation*>& layer_alphabets,
    std::size_t own_layer, const SicOptions& opt = {});

struct HnomaBlockResult {
  std::vector<int> bits;          // one decoded bit per user
  std::vector<int> level_labels;  // hard per-layer decisions (shifted levels)
  std::vector<double> raw;        // inverse-transform output before slicing
};

// Decode one transform-domain block from its single composite sample. All N
// layers share the level alphabet c (label = shifted transform value). With
// soft_combine the inverse transform consumes per-layer soft level estimates
// (hard labels still drive the SIC subtractions); this requires a real-PAM
// level alphabet.
HnomaBlockResult hnoma_decode_block(std::complex<double> y,
                                    std::complex<double> g_hat,
                                    const PowerProfile& p,
                                    const HadamardMatrix& h,
                                    const Constellation& c,
                                    bool soft_combine = false,
                                    const SicOptions& opt = {});

// Transmit side of the same chain: bits -> transform -> shared alphabet ->
// superposition, one composite sample per block.
std::complex<double> hnoma_encode_block(const std::vector<int>& bits,
                                        const PowerProfile& p,
                                        const HadamardMatrix& h,
                                        const Constellation& c);

// Post-modulation baseline: the N users' complex symbols are mixed by the
// unitary (1/sqrt(N)-scaled) transform and the mixed coordinates are
// superposed into one composite sample.
std::complex<double> unoma_encode_block(
    const std::vector<std::complex<double>>& user_symbols,
    const PowerProfile& p, const HadamardMatrix& h);

struct UnomaBlockResult {
  std::vector<int> labels;                       // per-user alphabet labels
  std::vector<std::complex<double>> mixed_hat;   // SIC estimates of the mix
};

// Finite per-layer alphabets of the unitary-mixed coordinates, precomputed
// once and shared across blocks.
struct UnomaContext {
  const HadamardMatrix* h = nullptr;
  const Constellation* c = nullptr;
  std::vector<std::vector<std::complex<double>>> layer_points;
};

UnomaContext make_unoma_context(const HadamardMatrix& h, const Constellation& c);

// Receive side: SIC over the mixed coordinates (each drawn from the finite
// alphabet of unitary-mixed user symbols), inverse unitary transform, then
// per-user nearest-point demap.
UnomaBlockResult unoma_decode_block(std::complex<double> y,
                                    std::complex<double> g_hat,
                                    const PowerProfile& p,
                                    const UnomaContext& ctx,
                                    const SicOptions& opt = {});

// Applies the unitary transform to one block of complex values.
std::vector<std::complex<double>> unitary_transform(
    const std::vector<std::complex<double>>& block, const HadamardMatrix& h);

struct SicIdentityReport {
  // far-user combined estimate assembled from the two decoded streams
  std::complex<double> combined_far;
  // the same quantity written directly in terms of x1, x2 and the noise
  std::complex<double> predicted_far;
  double far_residual;     // |combined - predicted|
  // near-user estimates: difference-combined vs direct single-layer
  std::complex<double> combined_near;
  std::complex<double> direct_near;
  // which sign on the difference line reproduces direct substitution
  bool minus_convention_matches;
};

// Evaluates the two-user combining identities on concrete draws: the sum
// stream (x1+x2 analog) and difference stream (x1-x2 analog) are formed from
// the noisy observation, recombined, and compared against the closed-form
// expansions.
SicIdentityReport sic_identity_check(std::complex<double> x1,
                                     std::complex<double> x2, double p1,
                                     double p2, std::complex<double> g,
                                     std::complex<double> n);

}  // namespace hnoma
