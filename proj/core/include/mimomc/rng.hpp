#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace mimomc {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable per-trial seed from (master, snr index, scheme index, trial index).
// The fused algorithm id is deliberately not mixed in, so every algorithm
// sees the same channel/noise realization for a given trial.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t a,
                                    std::uint64_t b,
                                    std::uint64_t c) noexcept {
    std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return splitmix64(h ^ c);
}

// mt19937_64 with hand-rolled output mappings. std::uniform_real_distribution
// and friends are implementation-defined, which would break cross-toolchain
// reproducibility of seeded sweeps.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform index in [0, n), Lemire multiply-shift
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    // standard normal via Box-Muller, one spare cached
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    // circularly symmetric complex gaussian, total variance E|z|^2 = variance
    std::complex<double> complex_gaussian(double variance) {
        const double s = std::sqrt(0.5 * variance);
        const double re = s * gaussian();
        const double im = s * gaussian();
        return {re, im};
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mimomc
