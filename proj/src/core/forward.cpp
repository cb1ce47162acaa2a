// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/forward.hpp"

#include <cmath>

#include "ghostsim/parallel.hpp"
#include "ghostsim/random.hpp"

namespace ghostsim {

void PhotonBudget::validate() const {
    if (!(flux_B > 0.0) || !std::isfinite(flux_B))
        throw InvalidArgument("PhotonBudget: flux_B must be positive and finite");
    if (!(t0_s > 0.0) || !std::isfinite(t0_s))
        throw InvalidArgument("PhotonBudget: t0_s must be positive and finite");
    if (J < 1) throw InvalidArgument("PhotonBudget: J must be at least 1");
    if (!(pitch_mm > 0.0) || !std::isfinite(pitch_mm))
        throw InvalidArgument("PhotonBudget: pitch_mm must be positive and finite");
}

BucketVector expected_buckets(const Image& T, const MaskEnsemble& ens,
                              const PhotonBudget& budget) {
    budget.validate();
    if (T.n() != ens.n)
        throw DimensionMismatch("expected_buckets: object is " + std::to_string(T.n()) +
                                "px, masks are " + std::to_string(ens.n) + "px");
    if (budget.J != ens.J)
        throw DimensionMismatch("expected_buckets: budget J=" + std::to_string(budget.J) +
                                " does not match ensemble J=" + std::to_string(ens.J));
    for (double v : T.data())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidArgument("expected_buckets: object transmission must be "
                                  "non-negative and finite");

    BucketVector b;
    b.J = ens.J;
    b.values.assign(ens.J, 0.0);
    b.exposure_s = budget.t0_s;
    b.noise = NoiseSpec{};
    b.photon_scale = budget.photon_scale();

    const std::vector<double>& t = T.data();
    parallel_for(ens.J, 64, [&](int64_t begin, int64_t end) {
        for (int64_t j = begin; j < end; ++j) {
            const std::vector<double>& a = ens.masks[j].data();
            double dot = 0.0;
            for (size_t x = 0; x < t.size(); ++x) dot += a[x] * t[x];
            b.values[j] = b.photon_scale * dot;
        }
    });
    return b;
}

namespace {

double noisy_value(double expected, const NoiseSpec& noise, Rng& rng) {
    double y = expected;
    if (noise.kind == NoiseKind::Poisson || noise.kind == NoiseKind::Both) {
        if (expected < 0.0)
            throw InvalidArgument("apply_noise: Poisson noise requires a non-negative "
                                  "expected value, got " + std::to_string(expected));
        const double gain = noise.sigma_p * noise.sigma_p;
        y = gain * rng.poisson(expected / gain);
    }
    if (noise.kind == NoiseKind::Gaussian || noise.kind == NoiseKind::Both)
        y += noise.sigma_m * rng.gaussian();
    return y;
}

} // namespace

BucketVector apply_noise(const BucketVector& buckets, const NoiseSpec& noise,
                         const Seed& seed) {
    noise.validate();
    BucketVector out = buckets;
    out.noise = noise;
    if (noise.kind == NoiseKind::None) return out;
    parallel_for(buckets.J, 256, [&](int64_t begin, int64_t end) {
        for (int64_t j = begin; j < end; ++j) {
            Rng rng(derive_seed(seed, static_cast<uint64_t>(j)));
            out.values[j] = noisy_value(buckets.values[j], noise, rng);
        }
    });
    return out;
}

namespace {

// Shared kernel of the two per-pixel reference modalities.  One derived
// stream per row keeps realizations independent of the parallel schedule.
Image per_pixel_counts(const Image& T, double dose_px, const NoiseSpec& noise,
                       const Seed& seed, const char* what) {
    if (!(dose_px > 0.0) || !std::isfinite(dose_px))
        throw InvalidArgument(std::string(what) + ": per-pixel dose must be positive");
    noise.validate();
    const int n = T.n();
    for (double v : T.data())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string(what) +
                                  ": object transmission must be non-negative and finite");

    Image out(n, n, T.pitch_mm());
    parallel_for(n, 8, [&](int64_t begin, int64_t end) {
        for (int64_t r = begin; r < end; ++r) {
            Rng rng(derive_seed(seed, static_cast<uint64_t>(r)));
            for (int c = 0; c < n; ++c)
                out.at(static_cast<int>(r), c) =
                    noisy_value(dose_px * T.at(static_cast<int>(r), c), noise, rng) / dose_px;
        }
    });
    return out;
}

} // namespace

Image simulate_direct(const Image& T, double dose_px, const NoiseSpec& noise,
                      const Seed& seed) {
    return per_pixel_counts(T, dose_px, noise, seed, "simulate_direct");
}

Image simulate_scan_probe(const Image& T, double dwell_photons, const NoiseSpec& noise,
                          const Seed& seed) {
    return per_pixel_counts(T, dwell_photons, noise, seed, "simulate_scan_probe");
}

} // namespace ghostsim
