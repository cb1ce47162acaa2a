// SPDX-License-Identifier: Apache-2.0
//
// Illumination mask ensembles: random and structured generators, Gaussian
// correlation shaping, and the mean-corrected Gram diagnostic.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ghostsim/core.hpp"

namespace ghostsim {

enum class MaskFamily {
    RandomBinary,
    RandomGray,
    Blurred,
    Hadamard,
    UraScan,
    PinholeScan,
};

const char* mask_family_name(MaskFamily family);

/// Ensemble of J illumination masks on an n-by-n grid, values in [0, 1].
///
/// mu_A / sigma_A cache the population mean and std over all J*n*n samples;
/// constant_sum is set when every mask has the same pixel sum (scanning-type
/// ensembles), in which case reconstruction can restore the object mean.
struct MaskEnsemble {
    int n = 0;
    int J = 0;
    MaskFamily family = MaskFamily::RandomBinary;
    std::vector<Image> masks;
    double mu_A = 0.0;
    double sigma_A = 0.0;
    std::optional<double> constant_sum;

    double pitch_mm() const { return masks.empty() ? 0.0 : masks.front().pitch_mm(); }
};

/// Ensemble-wide sample statistics, recomputed from the mask data.
struct EnsembleStats {
    double mu_A = 0.0;
    double sigma_A = 0.0;
    std::optional<double> constant_sum;
};

/// Population mean/std over all samples plus constant-sum detection
/// (per-mask sums agreeing to 1e-9 relative).
EnsembleStats ensemble_stats(const MaskEnsemble& ens);

/// Recompute cached stats in place (generators call this on construction).
void refresh_stats(MaskEnsemble& ens);

/// Ensemble made of the first J masks of `ens`, with stats recomputed.
MaskEnsemble take_prefix(const MaskEnsemble& ens, int J);

/// Ensemble of J masks drawn cyclically from `ens` (mask i of the result is
/// mask i mod ens.J of the input).  Used to repeat a complete scan when more
/// exposures than distinct masks are wanted.
MaskEnsemble tile_to(const MaskEnsemble& ens, int J);

/// J independent binary masks, each pixel 1 with probability mu_A.
MaskEnsemble gen_random_binary(int n, int J, double mu_A, const Seed& seed);

/// J independent gray masks, each pixel uniform on
/// [mu_A - sqrt(3) sigma_A, mu_A + sqrt(3) sigma_A], which must fit in [0,1]
/// (i.e. sigma_A <= min(mu_A, 1 - mu_A)/sqrt(3)).
MaskEnsemble gen_random_gray(int n, int J, double mu_A, double sigma_A, const Seed& seed);

/// Convolve every mask with a periodic normalized Gaussian of std
/// sigma_g_px pixels, truncated at 6 sigma.  Below 0.05 px the kernel
/// degenerates to a delta and masks pass through unchanged.  Per-mask means
/// are preserved; the result has family Blurred.
MaskEnsemble blur_masks(const MaskEnsemble& ens, double sigma_g_px);

/// Binarised Sylvester-Hadamard ensemble: J = n^2 masks, mask j has pixel x
/// equal to (H[j,x]+1)/2 with H[j,x] = (-1)^popcount(j & x) and pixels
/// indexed row-major.  n must be a power of two >= 2; mask 0 is all ones.
MaskEnsemble gen_hadamard(int n);

/// Uniformly-redundant-array scan: J = p^2 cyclic 2-D shifts of a base
/// pattern on a p-by-p grid (p prime >= 3).  The base pattern is built from
/// a spatially flat-spectrum sign array (Legendre signs on the p+1 line
/// directions through the origin, zero at the origin) mapped to mask values
/// (sign+1)/2, so masks take values {0, 1/2, 1} with a single 1/2 pixel and
/// every mask sums to exactly p^2/2.  The mean-corrected Gram of the result
/// is exactly (p^2/4)(I - 11^T/J).
MaskEnsemble gen_ura_scan(int p);

/// Raster scan of a single transparent pixel: J = n^2 delta masks.
MaskEnsemble gen_pinhole_scan(int n);

/// Mean-corrected Gram matrix: G[i][j] = sum_x (A_i(x) - m(x))(A_j(x) - m(x))
/// with m the per-pixel ensemble mean.  Returned row-major, J*J entries.
/// Emits a warning to stderr (but proceeds) when the working set exceeds
/// memory_budget_bytes.
std::vector<double> gram_mean_corrected(const MaskEnsemble& ens,
                                        size_t memory_budget_bytes = size_t(1) << 30);

} // namespace ghostsim
