// SPDX-License-Identifier: Apache-2.0
//
// Reconstruction operators: cross-correlation, its scaled (restored) form,
// Landweber iteration, and a regularized pseudo-inverse reference.

#pragma once

#include <optional>

#include "ghostsim/core.hpp"
#include "ghostsim/forward.hpp"
#include "ghostsim/masks.hpp"

namespace ghostsim {

/// Plain cross-correlation estimate T_hat(x) = sum_j A_j(x) (b_j - <b>).
/// Because the bucket fluctuations sum to zero, this equals the adjoint of
/// the mean-corrected forward map applied to any bucket vector.
Image xc(const MaskEnsemble& ens, const BucketVector& buckets);

/// Normalization constant gamma of the cross-correlation point-spread
/// function.  For the generic families this is the PSF integral, evaluated
/// in closed form as (1/n^2) sum_j (s_j - s_bar)^2 over mask pixel sums; for
/// the structured families the exact Gram scale is used instead (J/4 for
/// Hadamard and UraScan, 1 for PinholeScan), which is what makes their
/// noise-free inversion exact.
double compute_gamma(const MaskEnsemble& ens);

/// Quantitatively scaled cross-correlation: xc / (gamma * photon_scale),
/// with the object mean restored for ensembles that lose it (constant-sum
/// scans via <b>/(k * photon_scale); full Hadamard ensembles via the
/// all-ones mask).  Output is in transmission units.
Image scaled_xc(const MaskEnsemble& ens, const BucketVector& buckets);

/// Landweber iteration on the mean-corrected system, step alpha/(2 gamma),
/// starting from `init` (zero image when absent).  Aborts with NumericError
/// if the residual norm grows for 10 consecutive iterations.  The object
/// mean is restored on output exactly as in scaled_xc.
Image landweber(const MaskEnsemble& ens, const BucketVector& buckets,
                double alpha, int iterations,
                const std::optional<Image>& init = std::nullopt);

struct PinvOptions {
    int max_pixels = 4096;      ///< refuse larger grids (dense normal matrix)
    double ridge_scale = 1e-10; ///< ridge = ridge_scale * trace / n^2
};

/// Least-squares reference reconstruction: solves the mean-corrected normal
/// equations with a small ridge (LDLT factorization).  Intended for modest
/// grids; refuses n^2 > options.max_pixels.  Mean restored as in scaled_xc.
Image pinv_recon(const MaskEnsemble& ens, const BucketVector& buckets,
                 const PinvOptions& options = {});

} // namespace ghostsim
