#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace deepofw {

// Deterministic random stream. Gaussian and uniform draws are generated from
// raw mt19937_64 words with fixed arithmetic (no std::*_distribution), so a
// given seed reproduces the same values on any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Mixes (seed, stream) into an independent child seed. Used to give every
    // work item (optimizer step, Monte-Carlo block, worker slot) its own
    // stream so results do not depend on scheduling order.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t word() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int bit() { return static_cast<int>(eng_() >> 63); }

    // Standard normal via Box-Muller; draws exactly two uniforms.
    double normal();

    // Circular complex Gaussian with E|z|^2 = var.
    std::complex<double> cnormal(double var);

private:
    std::mt19937_64 eng_;
};

}  // namespace deepofw
