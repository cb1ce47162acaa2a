// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random sampling.
//
// The generator is std::mt19937_64 (its algorithm is fixed by the C++
// standard), but all distributions are implemented here rather than taken
// from <random>: the standard leaves distribution algorithms
// implementation-defined, which would break reproducible streams across
// toolchains.

#pragma once

#include <cstdint>
#include <random>

#include "ghostsim/core.hpp"

namespace ghostsim {

/// Seeded random stream with stable distribution algorithms.
class Rng {
public:
    explicit Rng(const Seed& seed) : eng_(seed.value) {}
    explicit Rng(uint64_t value) : eng_(value) {}

    /// Raw 64 random bits.
    uint64_t bits() { return eng_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Marsaglia polar method).
    double gaussian();

    /// Poisson deviate with mean lambda >= 0.
    ///
    /// Exact sampling below lambda = 1e6 (product-of-uniforms inversion for
    /// small means, Hormann's PTRD transformed rejection otherwise); above
    /// 1e6 a rounded Gaussian approximation is used, as documented in the
    /// measurement-noise contract.
    double poisson(double lambda);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ghostsim
