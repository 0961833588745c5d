#pragma once

// Seeded random streams for Monte Carlo runs. The generation algorithms are
// spelled out here (rather than relying on std:: distributions, whose output
// is implementation-defined) so that a given seed produces the same stream on
// every platform.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace latvp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller, one spare cached
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mag * std::cos(ang);
    }

    // circularly symmetric complex Gaussian with total variance var_per_complex
    std::complex<double> cgaussian(double var_per_complex) {
        const double s = std::sqrt(var_per_complex / 2.0);
        const double re = gaussian() * s;
        const double im = gaussian() * s;
        return {re, im};
    }

    // uniform index in [0, n); bias is O(2^-53), irrelevant at our scales
    std::size_t uniform_index(std::size_t n) {
        auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return idx >= n ? n - 1 : idx;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Substream splitting rule for parallel Monte Carlo: master seed XOR the
// stream index, diffused through splitmix64. Deterministic regardless of
// which worker picks up which stream.
inline Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(splitmix64(master_seed ^ index));
}

}  // namespace latvp
