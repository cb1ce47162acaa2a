// SPDX-License-Identifier: Apache-2.0
//
// Shutter-free CCD acquisition: sandpaper speckle masks, the glyph stencil,
// frame-transfer read-out smear, and the tabletop ghost-imaging experiment
// replication built from them.

#pragma once

#include <cstdint>
#include <vector>

#include "ghostsim/core.hpp"
#include "ghostsim/forward.hpp"
#include "ghostsim/masks.hpp"

namespace ghostsim {

/// Frame-transfer CCD description.  `rows`/`cols` are native pixels; frames
/// are produced on the binned grid (rows/binning by cols/binning).
/// readout_s is the full-frame shift time t1; during read-out each charge
/// packet dwells readout_s / (rows/binning) under every binned row it
/// crosses.
struct CcdConfig {
    int rows = 1300;
    int cols = 256;
    double readout_s = 0.93;
    int binning = 1;
    bool cleared_before_exposure = true;
    double rotation_deg = 0.0; ///< scene rotation applied by the presets

    void validate() const;
    int binned_rows() const { return rows / binning; }
    int binned_cols() const { return cols / binning; }
};

/// Speckle ensemble mimicking ground-glass / sandpaper diffusers: binary
/// half-coverage patterns blurred with a 0.117 mm Gaussian and affinely
/// rescaled per ensemble so values span [0.5, 1.0] (mean 0.75).  Default
/// grid: n = 250 px over fov_mm = 5 mm (20 um pitch).
MaskEnsemble gen_sandpaper_speckle(int J, int n = 250, double fov_mm = 5.0,
                                   const Seed& seed = Seed{1, "speckle"});

/// Radially averaged normalized second-order correlation of an ensemble.
struct G2Profile {
    std::vector<double> radius_mm;
    std::vector<double> value; ///< g2 at each radius
    double max = 0.0;          ///< g2 at zero displacement
    double fwhm_mm = 0.0;      ///< full width at half maximum of g2 - 1
};

/// g2(d) = <A(p)A(p+d)>_{j,p} / <m(p)m(p+d)>_p with m the per-pixel mean
/// map, radially averaged.  Requires J >= 100 and a non-degenerate
/// ensemble.
G2Profile g2_profile(const MaskEnsemble& ens);

/// Binary transmission stencil with block letters "XGI" (2.5 mm tall,
/// ~0.13 mm strokes) on an n-by-n grid covering 5 mm * n/250.  n >= 64.
/// Nonzero rotation resamples bilinearly about the center (values clamped
/// to [0,1], so rotated stencils are no longer strictly binary).
Image make_stencil(int n, double rotation_deg = 0.0);

/// Frame-transfer read-out smear on expected intensities.  `rate` is the
/// expected photon rate per binned pixel per second on the full frame
/// (binned_rows by binned_cols, row 0 read out first):
///   Q(r,c) = t0 * rate(r,c) + (t1/R) * sum_{k<r} rate(k,c)
/// with R = binned_rows and t1 = readout_s.  When the sensor is not cleared
/// before the exposure the complementary term (t1/R) * sum_{k>r} rate(k,c)
/// from the previous shift cycle is added as well.  Noise is applied
/// separately.
Image readout_smear(const Image& rate, double t0_s, const CcdConfig& ccd);

/// One CCD frame of the tabletop experiment: expected rate 120 * T * A
/// photons/s per native pixel in the scene block (placed at the first-read
/// rows of the frame), binned, smeared when `shutter` is false, Poisson
/// sampled, plus per-pixel dark counts 0.01 * Poisson(100 (t0 + t1)).
Image zhang_frame(const Image& T, const Image& mask, double t0_s,
                  const CcdConfig& ccd, bool shutter, const Seed& seed);

enum class SmearMitigation { None, CropSmear, DarkfieldSubtract };

/// Optional pixel-region parameters for frame_to_bucket.
struct BucketRegion {
    int row_begin = 0;
    int row_end = 0;      ///< exclusive; 0 means "all rows"
    int dark_row_begin = 0;
    int dark_row_end = 0; ///< dark-field estimation rows (exclusive end)
};

/// Collapse a frame to a bucket value.  None sums every pixel; CropSmear
/// sums rows [row_begin, row_end) only; DarkfieldSubtract removes a
/// per-column mean estimated over the dark rows before summing.
double frame_to_bucket(const Image& frame, SmearMitigation mitigation,
                       const BucketRegion& region = {});

enum class ZhangExperiment { I, II, III };

/// Everything the experiment replication produces.
struct ZhangResult {
    ZhangExperiment experiment = ZhangExperiment::I;
    bool shutter = true;
    CcdConfig ccd;
    double t0_s = 0.0;
    Image recon;        ///< GI reconstruction (i, ii) or direct frame (iii)
    Image reference;    ///< PSF-matched blurred stencil on the recon grid
    Image sample_frame; ///< first acquired frame
    BucketVector buckets;
    double r = 0.0;         ///< Pearson correlation recon vs reference
    double r_control = 0.0; ///< mean of the same over 8 source-blocked control runs
};

/// Replicate one arm of the tabletop experiment:
///   I   ghost imaging, t0 = 150 ms, 8x8 binning, t1 = 0.12 s, J = 10^4
///   II  ghost imaging, t0 = 1 us, same camera
///   III direct image through the first speckle mask, t0 = 10 ms,
///       native resolution, t1 = 0.93 s, stencil rotated 60 degrees
/// `shutter` selects whether the source is shielded during read-out.
ZhangResult run_zhang(ZhangExperiment experiment, bool shutter, const Seed& seed,
                      int J = 10000);

} // namespace ghostsim
