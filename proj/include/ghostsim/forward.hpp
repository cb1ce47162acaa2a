// SPDX-License-Identifier: Apache-2.0
//
// Forward measurement model: photon budgets, noise-free bucket values,
// measurement noise, and the direct / scanning reference modalities.

#pragma once

#include <vector>

#include "ghostsim/core.hpp"
#include "ghostsim/masks.hpp"

namespace ghostsim {

/// Photon bookkeeping for a J-exposure acquisition.
///
/// flux_B is the source flux in photons / s / mm^2, t0_s the per-exposure
/// time, pitch_mm the pixel pitch.  Derived quantities are computed on
/// demand so they can never drift from the stored fields.
struct PhotonBudget {
    double flux_B = 0.0;
    double t0_s = 0.0;
    int J = 0;
    double pitch_mm = 0.0;

    void validate() const;

    /// Photons per unit object sum in one exposure: B * t0 * pitch^2.
    double photon_scale() const { return flux_B * t0_s * pitch_mm * pitch_mm; }
    /// Total detected photons over the acquisition for a fully transparent
    /// unit object: P = B * J * t0 * pitch^2.
    double total_photons() const { return photon_scale() * J; }
    /// Total acquisition time tau = J * t0.
    double total_time_s() const { return t0_s * J; }
};

/// One acquisition's bucket readings plus the context needed to interpret
/// them (exposure, noise description, photons-per-unit-sum scale).
struct BucketVector {
    int J = 0;
    std::vector<double> values;
    double exposure_s = 0.0;
    NoiseSpec noise;
    double photon_scale = 1.0;
};

/// Noise-free expected buckets b_j = photon_scale * sum_x A_j(x) T(x).
/// T must be a square image matching the ensemble's grid and pitch-free
/// non-negative transmission values.
BucketVector expected_buckets(const Image& T, const MaskEnsemble& ens,
                              const PhotonBudget& budget);

/// Apply measurement noise to bucket values.  Poisson noise models photon
/// counting at gain sigma_p (y = sigma_p^2 * Poisson(lambda / sigma_p^2)) and
/// requires non-negative expectations; Gaussian noise adds N(0, sigma_m);
/// Both applies Poisson then Gaussian.  Every measurement uses its own
/// derived substream of `seed`.
BucketVector apply_noise(const BucketVector& buckets, const NoiseSpec& noise,
                         const Seed& seed);

/// Conventional direct image: per-pixel dose dose_px * T(x), noise applied
/// per pixel, then normalized back to transmission units.
Image simulate_direct(const Image& T, double dose_px, const NoiseSpec& noise,
                      const Seed& seed);

/// Scanning-probe image: identical per-pixel model with dwell_photons per
/// pixel; same seed path as simulate_direct, so equal doses give identical
/// realizations.
Image simulate_scan_probe(const Image& T, double dwell_photons,
                          const NoiseSpec& noise, const Seed& seed);

} // namespace ghostsim
