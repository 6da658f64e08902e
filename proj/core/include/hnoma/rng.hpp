#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace hnoma {

/* splitmix64 finalizer; whitens stream ids into engine seeds */
std::uint64_t mix64(std::uint64_t x);

/*
 * Deterministic named stream. Streams are addressed by up to four ids
 * (scenario hash, SNR index, chunk index, purpose) derived from one master
 * seed, so any worker can recreate any stream without coordination.
 */
class RngStream {
public:
    RngStream() : RngStream(0, 0, 0, 0, 0) {}
    RngStream(std::uint64_t master, std::uint64_t id0, std::uint64_t id1 = 0,
              std::uint64_t id2 = 0, std::uint64_t id3 = 0);

    std::uint64_t next_u64();
    double uniform();                  // [0, 1)
    double gauss();                    // N(0, 1), Box-Muller
    std::complex<double> cn01();       // CN(0, 1): variance 1/2 per axis
    int bit();                         // fair bit
    std::uint32_t below(std::uint32_t bound);  // uniform in [0, bound)
    double gamma(double shape, double scale);  // Gamma(k, theta)

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hnoma
