#include "hnoma/hadamard.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace hnoma {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

template <typename T>
void butterfly(std::vector<T>& v) {
    const std::size_t n = v.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const T a = v[j];
                const T b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
}

/* dense product kept for small orders; must agree with butterfly() bit for bit */
template <typename T>
std::vector<T> dense_product(const HadamardMatrix& h, const std::vector<T>& v) {
    const std::size_t n = h.order;
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        T acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc += (h.entry(i, j) > 0) ? v[j] : -v[j];
        out[i] = acc;
    }
    return out;
}

template <typename T>
std::vector<T> apply(const HadamardMatrix& h, std::vector<T> v) {
    if (h.order <= kDenseTransformLimit) return dense_product(h, v);
    butterfly(v);
    return v;
}

}  // namespace

int HadamardMatrix::entry(std::size_t i, std::size_t j) const {
    if (i >= order || j >= order)
        throw std::out_of_range("hadamard entry index out of range");
    return (std::popcount(i & j) & 1u) ? -1 : 1;
}

std::vector<std::vector<int>> HadamardMatrix::dense() const {
    if (order > 4096)
        throw std::invalid_argument("dense() limited to order 4096");
    std::vector<std::vector<int>> m(order, std::vector<int>(order));
    for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; j < order; ++j)
            m[i][j] = entry(i, j);
    return m;
}

HadamardMatrix build_hadamard(std::size_t order) {
    if (!is_pow2(order))
        throw std::invalid_argument("hadamard order must be a power of two, got " +
                                    std::to_string(order));
    if (order > kMaxHadamardOrder)
        throw std::invalid_argument("hadamard order capped at 65536, got " +
                                    std::to_string(order));
    return HadamardMatrix{order};
}

TransformedVector forward_transform(const std::vector<int>& bits, const HadamardMatrix& h) {
    if (bits.size() != h.order)
        throw std::invalid_argument("bit block length must equal transform order");
    for (int b : bits)
        if (b != 0 && b != 1)
            throw std::invalid_argument("bits must be 0 or 1");

    std::vector<long long> v(bits.begin(), bits.end());
    TransformedVector out;
    out.w = apply(h, std::move(v));
    out.shifted = out.w;
    const long long m = static_cast<long long>(h.order / 2);
    for (auto& x : out.shifted) x += m;
    return out;
}

InverseResult inverse_transform(const std::vector<double>& shifted, const HadamardMatrix& h) {
    if (shifted.size() != h.order)
        throw std::invalid_argument("shifted block length must equal transform order");

    const double m = static_cast<double>(h.order / 2);
    std::vector<double> v(shifted.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) v[i] = shifted[i] - m;

    InverseResult out;
    out.raw = apply(h, std::move(v));
    const double scale = 1.0 / static_cast<double>(h.order);
    out.bits.resize(out.raw.size());
    for (std::size_t i = 0; i < out.raw.size(); ++i) {
        out.raw[i] *= scale;
        out.bits[i] = slice_bit(out.raw[i]);
    }
    return out;
}

void fwht(std::vector<long long>& v) {
    if (!is_pow2(v.size())) throw std::invalid_argument("fwht size must be a power of two");
    butterfly(v);
}

void fwht(std::vector<double>& v) {
    if (!is_pow2(v.size())) throw std::invalid_argument("fwht size must be a power of two");
    butterfly(v);
}

int slice_bit(double raw) { return raw >= 0.5 ? 1 : 0; }

}  // namespace hnoma
