#include "hnoma/rng.hpp"

#include <cmath>

namespace hnoma {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master, std::uint64_t id0, std::uint64_t id1,
                     std::uint64_t id2, std::uint64_t id3) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ id0);
    h = mix64(h ^ id1);
    h = mix64(h ^ id2);
    h = mix64(h ^ id3);
    gen_.seed(h);
}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
}

std::complex<double> RngStream::cn01() {
    const double s = M_SQRT1_2;
    const double re = gauss() * s;
    const double im = gauss() * s;
    return {re, im};
}

int RngStream::bit() { return static_cast<int>(gen_() >> 63); }

std::uint32_t RngStream::below(std::uint32_t bound) {
    // modulo with top-block rejection, exact uniformity
    const std::uint64_t span = bound;
    std::uint64_t x = gen_();
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
    while (x >= limit) x = gen_();
    return static_cast<std::uint32_t>(x % span);
}

double RngStream::gamma(double shape, double scale) {
    std::gamma_distribution<double> d(shape, scale);
    return d(gen_);
}

}  // namespace hnoma
