// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/random.hpp"

#include <cmath>

#include "ghostsim/errors.hpp"

namespace ghostsim {

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

namespace {

// log(k!) for k = 0..9, used by the PTRD acceptance test.
constexpr double kLogFactorial[10] = {
    0.0,
    0.0,
    0.6931471805599453,
    1.791759469228055,
    3.1780538303479458,
    4.787491742782046,
    6.579251212010101,
    8.525161361065415,
    10.60460290274525,
    12.801827480081469,
};

} // namespace

double Rng::poisson(double lambda) {
    if (!(lambda >= 0.0))
        throw InvalidArgument("poisson: expected value must be non-negative, got " +
                              std::to_string(lambda));
    if (lambda == 0.0) return 0.0;

    if (lambda < 10.0) {
        // Product-of-uniforms inversion.
        const double limit = std::exp(-lambda);
        double product = uniform();
        double k = 0.0;
        while (product > limit) {
            product *= uniform();
            k += 1.0;
        }
        return k;
    }

    if (lambda > 1e6) {
        // Gaussian approximation for very large means (documented contract).
        const double x = std::floor(lambda + std::sqrt(lambda) * gaussian() + 0.5);
        return x < 0.0 ? 0.0 : x;
    }

    // Hormann's PTRD transformed rejection, valid for lambda >= 10.
    const double smu = std::sqrt(lambda);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    constexpr double log_sqrt_2pi = 0.9189385332046727;

    for (;;) {
        double u;
        double v = uniform();
        if (v <= 0.86 * vr) {
            u = v / vr - 0.43;
            return std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + lambda + 0.445);
        }
        if (v >= vr) {
            u = uniform() - 0.5;
        } else {
            u = v / vr - 0.93;
            u = (u < 0.0 ? -0.5 : 0.5) - u;
            v = uniform() * vr;
        }
        const double us = 0.5 - std::fabs(u);
        if (us < 0.013 && v > us) continue;
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.445);
        v = v * inv_alpha / (a / (us * us) + b);
        if (k >= 10.0) {
            if (std::log(v * smu) <=
                (k + 0.5) * std::log(lambda / k) - lambda - log_sqrt_2pi + k -
                    (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k)
                return k;
        } else if (k >= 0.0) {
            if (std::log(v) <= k * std::log(lambda) - lambda -
                                   kLogFactorial[static_cast<int>(k)])
                return k;
        }
    }
}

} // namespace ghostsim
