#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace hnoma {

// Finite complex alphabet addressed by integer label; points[l] is the symbol
// for label l. probs[l] is the label probability under the declared input
// distribution (uniform unless built otherwise); avg_energy is computed under
// that distribution and is 1 after normalization. kappa is the scale applied
// to the raw (integer-valued) alphabet; raw_energy = 1/kappa^2.
struct Constellation {
  std::string name;
  std::vector<std::complex<double>> points;
  std::vector<int> labels;
  std::vector<double> probs;
  double kappa = 1.0;
  double raw_energy = 1.0;
  double avg_energy = 1.0;
  // log2(points.size()) when the label space is a packed bit pattern (QAM),
  // 0 for level-indexed alphabets.
  int label_bits = 0;

  std::size_t size() const { return points.size(); }
};

struct SymbolStream {
  std::vector<std::complex<double>> symbols;
  std::vector<int> source_labels;
};

// Real PAM over levels 0..L-1, level l at amplitude (2l-(L-1))*kappa.
// The uniform overload normalizes against equiprobable levels; the weighted
// overload against the supplied level distribution.
Constellation build_shifted_integer_pam(int level_count);
Constellation build_shifted_integer_pam(int level_count,
                                        const std::vector<double>& level_probs);

// Shared PAM alphabet for the shifted Hadamard outputs of the given order:
// 3*order/2 + 1 levels, normalized against the level distribution induced by
// uniform input bits across all rows (enumerated exactly for order <= 8,
// fixed-seed sampled above that).
Constellation pam_for_hadamard(int order);

// Level-indexed unit-circle alternative for the shifted Hadamard outputs:
// level l at exp(j*(pi/4 + 2*pi*l/L)), so cyclically adjacent levels are
// spatial neighbours and L=4 coincides with QPSK.
Constellation build_level_ring_psk(int level_count);

// Gray-labeled square QAM, M in {4, 16, 64}. Label = (gray(i) << v/2) | gray(q)
// with i, q the real/imaginary axis positions and v = log2 M; amplitudes are
// odd integers scaled to unit average energy.
Constellation build_square_qam(int m);

SymbolStream map_labels(const std::vector<int>& labels, const Constellation& c);

// Label of the point p minimizing |y - scale*p|^2; ties go to the lowest label.
int ml_demap(std::complex<double> y, std::complex<double> scale,
             const Constellation& c);

}  // namespace hnoma
