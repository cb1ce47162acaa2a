// SPDX-License-Identifier: Apache-2.0
//
// Resolution and signal-to-noise analysis: Green's functions, the ensemble
// point-spread function, closed-form SNR laws, dose-matched comparison
// ratios, and the parameter-sweep harness.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghostsim/core.hpp"
#include "ghostsim/forward.hpp"
#include "ghostsim/masks.hpp"

namespace ghostsim {

/// Inputs of the closed-form SNR laws.
struct TheoryParams {
    int J = 0;            ///< number of exposures
    int n = 0;            ///< object side in pixels
    double mu_A = 0.5;    ///< mask mean
    double sigma_A = 0.5; ///< mask std
    double mu_T = 0.5;    ///< object mean
    double sigma_T = 0.0; ///< object std
    double P = 0.0;       ///< total detected photons
    double sigma_p = 1.0; ///< Poisson gain
    double sigma_m = 0.0; ///< Gaussian read noise (photons)
};

/// Which SNR law family applies: statistically independent masks or an
/// orthogonal (Hadamard/URA-type) set.
enum class TheoryFamily { Random, Orthogonal };

/// Point response of the ensemble to a delta object at (x*, y*):
/// G(x) = sum_j (A_j(x*,y*) - m(x*,y*)) (A_j(x) - m(x)).
Image greens(const MaskEnsemble& ens, int x_star, int y_star);

/// Ensemble point-spread function (J/n^2 times the mean periodic
/// autocorrelation of the mean-corrected masks), centered so displacement
/// zero maps to the image center pixel (rows/2, cols/2).
Image psf(const MaskEnsemble& ens);

/// Periodic convolution of T with a centered PSF.  A delta PSF of weight w
/// returns w * T.
Image predict_via_psf(const Image& T, const Image& psf);

struct RmseSnr {
    double rmse = 0.0;
    double snr = 0.0; ///< 1/rmse, +inf when rmse == 0
};

/// Root-mean-square error between reconstruction and reference, and the
/// corresponding SNR = 1/RMSE.
RmseSnr rmse_snr(const Image& recon, const Image& reference);

/// Noise-free SNR of scaled cross-correlation with independent random
/// masks: sqrt(J / (n^2 (mu_T^2 + sigma_T^2))).
double theory_snr0_random(const TheoryParams& p);

/// Noise-free SNR with an orthogonal ensemble truncated to J of n^2 masks:
/// sqrt(n^2 / ((n^2 - J) sigma_T^2)), +inf once J >= n^2.
double theory_snr0_ortho(const TheoryParams& p);

/// Closed-form RMSE decomposition under measurement noise.
struct NoiseSnr {
    double rmse_0 = 0.0; ///< ensemble artefact term
    double rmse_p = 0.0; ///< Poisson term
    double rmse_m = 0.0; ///< Gaussian term
    double snr = 0.0;    ///< 1/sqrt(sum of squared terms)
};

NoiseSnr theory_snr_noise(const TheoryParams& p, TheoryFamily family);

/// Exposure count that balances the artefact and read-noise terms at fixed
/// total photons: J_opt = P n sigma_A sqrt(mu_T^2 + sigma_T^2) / sigma_m.
double j_opt(const TheoryParams& p);

/// Dose-matched SNR ratios of ghost imaging against the reference
/// modalities (scanning probe / direct imaging, Gaussian / Poisson noise).
struct ComparisonRatios {
    double sp_gauss = 0.0;   ///< sqrt(J / (n^4 sigma_A^2))
    double di_gauss = 0.0;   ///< sqrt(J mu_A^2 / sigma_A^2)
    double sp_poisson = 0.0; ///< sqrt(mu_A / sigma_A^2)
    double di_poisson = 0.0; ///< sqrt(n^2 mu_A^2 / sigma_A^2)
};

ComparisonRatios comparison_ratios(const TheoryParams& p);

// ------------------------------------------------------------------ objects

/// Uniform random object with values on
/// [mu_T - sqrt(3) sigma_T, mu_T + sqrt(3) sigma_T], which must fit in [0,1].
Image make_uniform_object(int n, double mu_T, double sigma_T, const Seed& seed);

/// Two-level glyph stencil: value `hi` on the round(frac_hi * n^2) pixels
/// best covered by the built-in glyphs, `lo` elsewhere.  The exact pixel
/// count makes the object's mean and std reproducible in closed form.
Image make_two_level_stencil(int n, double frac_hi = 0.29, double lo = 0.25,
                             double hi = 0.75);

// ------------------------------------------------------------------- sweeps

enum class ReconMethod { Xc, ScaledXc, Landweber, Pinv };
const char* recon_method_name(ReconMethod m);

enum class BudgetMode {
    ConstantT0,  ///< fixed per-exposure time, dose grows with J
    ConstantTau, ///< fixed total time, t0 = tau/J
    NoiseFree,   ///< skip noise entirely
};
const char* budget_mode_name(BudgetMode m);

enum class ObjectKind { UniformRandom, TwoLevelStencil };

/// One measured sweep point.
struct SnrRecord {
    std::string sweep_name;
    std::string varied_param;
    double value = 0.0;
    std::string family;
    std::string recon;
    std::string noise;
    uint64_t seed = 0;
    double snr_sim = 0.0;
    double snr_theory = 0.0;
    double rmse0 = 0.0; ///< theory artefact component
    double rmsep = 0.0; ///< theory Poisson component
    double rmsem = 0.0; ///< theory Gaussian component
};

struct SweepConfig {
    std::string sweep_name = "sweep";
    /// One of: J, n, mu_A, sigma_A, mu_T, sigma_T, P_over_J.
    std::string varied_param = "J";
    std::vector<double> values;

    // Fixed-point defaults (overridden per grid point by varied_param).
    int J = 4096;
    int n = 64;
    double mu_A = 0.5;
    double sigma_A = 0.5; ///< used by gray masks; binary derives its own
    std::vector<MaskFamily> families = {MaskFamily::RandomBinary};
    double sigma_g_px = 1.0; ///< blur width when family == Blurred
    std::vector<NoiseSpec> noises = {NoiseSpec{}};
    int seeds = 1;
    Seed root_seed{42, "sweep"};

    BudgetMode budget_mode = BudgetMode::NoiseFree;
    double flux_B = 4.1e5;
    double t0_s = 0.01;
    double tau_s = 82.0;
    double pitch_mm = 0.0; ///< <= 0 selects 1/n

    ObjectKind object = ObjectKind::UniformRandom;
    double mu_T = 0.5;
    double sigma_T = 0.28867513459481287; ///< uniform [0,1) std

    ReconMethod recon = ReconMethod::ScaledXc;
    double landweber_alpha = 1.0;
    int landweber_iterations = 200;
};

/// Run the sweep: for every (grid value, family, noise, seed) generate
/// masks and object, simulate buckets, reconstruct, and record measured and
/// predicted SNR along with the theory RMSE components.
std::vector<SnrRecord> run_sweep(const SweepConfig& config);

} // namespace ghostsim
