#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hnoma {

inline constexpr std::size_t kMaxHadamardOrder = 1u << 16;
/* orders at or below this use the dense matrix product, larger ones the butterfly */
inline constexpr std::size_t kDenseTransformLimit = 64;

/*
 * Sylvester construction in natural order: entry(i, j) = (-1)^popcount(i & j).
 * Entries are never materialized unless dense() is called, so large orders
 * stay cheap to hold.
 */
struct HadamardMatrix {
    std::size_t order = 1;

    int entry(std::size_t i, std::size_t j) const;
    std::vector<std::vector<int>> dense() const;  // order <= 4096 only
};

HadamardMatrix build_hadamard(std::size_t order);

/* w = H d over one block of user bits; shifted = w + (order/2) elementwise */
struct TransformedVector {
    std::vector<long long> w;
    std::vector<long long> shifted;
};

TransformedVector forward_transform(const std::vector<int>& bits, const HadamardMatrix& h);

/*
 * Accepts noisy real-valued shifted estimates: subtracts the shift, applies
 * (1/N) H, and slices at 0.5 with ties resolved to 1.
 */
struct InverseResult {
    std::vector<double> raw;
    std::vector<int> bits;
};

InverseResult inverse_transform(const std::vector<double>& shifted, const HadamardMatrix& h);

/* in-place butterfly; size must be a power of two */
void fwht(std::vector<long long>& v);
void fwht(std::vector<double>& v);

int slice_bit(double raw);

}  // namespace hnoma
