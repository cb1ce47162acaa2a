/* SPDX-License-Identifier: Apache-2.0
 *
 * C API of the ghostsim library.
 *
 * All functions return a GS_* status code (GS_OK on success) and report
 * results through output pointers.  On failure a human-readable message is
 * available from gs_last_error() until the next call on the same thread.
 * Objects are created behind opaque handles and released with the matching
 * *_destroy function; destroy functions accept NULL.
 */

#ifndef GHOSTSIM_GHOSTSIM_H_
#define GHOSTSIM_GHOSTSIM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ----------------------------------------------------------- status codes */

enum GsStatus {
    GS_OK = 0,
    GS_E_INVALID_ARGUMENT = 1,
    GS_E_DIMENSION_MISMATCH = 2,
    GS_E_NUMERIC = 3,
    GS_E_IO = 4,
    GS_E_NOMEM = 5,
    GS_E_UNKNOWN = 6
};

/* Version string of the library, e.g. "0.1.0". */
const char* gs_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
const char* gs_last_error(void);

/* Stable name of a status code, e.g. "GS_E_NUMERIC". */
const char* gs_status_name(int status);

/* ---------------------------------------------------------------- handles */

typedef struct GsImage GsImage;       /* dense 2-D double image */
typedef struct GsEnsemble GsEnsemble; /* illumination mask ensemble */
typedef struct GsBuckets GsBuckets;   /* bucket measurement vector */
typedef struct GsRecords GsRecords;   /* sweep result table */
typedef struct GsZhang GsZhang;       /* tabletop experiment result */

/* ------------------------------------------------------------------ enums */

enum GsMaskFamily {
    GS_MASK_RANDOM_BINARY = 0,
    GS_MASK_RANDOM_GRAY = 1,
    GS_MASK_BLURRED = 2,
    GS_MASK_HADAMARD = 3,
    GS_MASK_URA_SCAN = 4,
    GS_MASK_PINHOLE_SCAN = 5
};

enum GsNoiseKind {
    GS_NOISE_NONE = 0,
    GS_NOISE_POISSON = 1,
    GS_NOISE_GAUSSIAN = 2,
    GS_NOISE_BOTH = 3
};

enum GsReconMethod {
    GS_RECON_XC = 0,
    GS_RECON_SCALED_XC = 1,
    GS_RECON_LANDWEBER = 2,
    GS_RECON_PINV = 3
};

enum GsBudgetMode {
    GS_BUDGET_CONSTANT_T0 = 0,
    GS_BUDGET_CONSTANT_TAU = 1,
    GS_BUDGET_NOISE_FREE = 2
};

enum GsObjectKind {
    GS_OBJECT_UNIFORM_RANDOM = 0,
    GS_OBJECT_TWO_LEVEL_STENCIL = 1
};

enum GsTheoryFamily {
    GS_THEORY_RANDOM = 0,
    GS_THEORY_ORTHOGONAL = 1
};

enum GsSmearMitigation {
    GS_SMEAR_NONE = 0,
    GS_SMEAR_CROP = 1,
    GS_SMEAR_DARKFIELD = 2
};

enum GsZhangExperiment {
    GS_ZHANG_I = 1,
    GS_ZHANG_II = 2,
    GS_ZHANG_III = 3
};

/* Stable lower-case family name ("random_binary", ...). */
int gs_mask_family_name(int family, const char** out);
/* Inverse of gs_mask_family_name. */
int gs_mask_family_from_name(const char* name, int* out);

/* ----------------------------------------------------------------- images */

/* Zero-filled rows-by-cols image.  pitch_mm <= 0 selects 1/cols mm. */
int gs_image_create(int rows, int cols, double pitch_mm, GsImage** out);
void gs_image_destroy(GsImage* img);
int gs_image_clone(const GsImage* img, GsImage** out);

int gs_image_rows(const GsImage* img, int* out);
int gs_image_cols(const GsImage* img, int* out);
int gs_image_pitch_mm(const GsImage* img, double* out);

/* Borrowed pointer to the row-major pixel array (rows*cols doubles); valid
 * until the image is destroyed. */
int gs_image_data(GsImage* img, double** out);

/* Bounds-checked element access. */
int gs_image_get(const GsImage* img, int row, int col, double* out);
int gs_image_set(GsImage* img, int row, int col, double value);

/* Mean and population standard deviation over all pixels. */
int gs_image_stats(const GsImage* img, double* mu, double* sigma);

/* 16-bit PGM round trip; see the library documentation for the scale
 * window semantics (lo == hi selects the image's own range on write). */
int gs_image_write_pgm16(const GsImage* img, const char* path, double lo, double hi);
int gs_image_read_pgm16(const char* path, GsImage** out, double* lo, double* hi);

/* ---------------------------------------------------------------- objects */

/* Uniform random object on [mu - sqrt(3) sigma, mu + sqrt(3) sigma]. */
int gs_make_uniform_object(int n, double mu, double sigma, uint64_t seed,
                           const char* seed_label, GsImage** out);

/* Two-level glyph stencil with exactly round(frac_hi n^2) pixels at `hi`. */
int gs_make_two_level_stencil(int n, double frac_hi, double lo, double hi,
                              GsImage** out);

/* Binary "XGI" transmission stencil at 20 um pitch, optionally rotated. */
int gs_make_stencil(int n, double rotation_deg, GsImage** out);

/* -------------------------------------------------------------- ensembles */

int gs_gen_random_binary(int n, int J, double mu_A, uint64_t seed,
                         const char* seed_label, GsEnsemble** out);
int gs_gen_random_gray(int n, int J, double mu_A, double sigma_A, uint64_t seed,
                       const char* seed_label, GsEnsemble** out);
int gs_gen_hadamard(int n, GsEnsemble** out);
int gs_gen_ura_scan(int p, GsEnsemble** out);
int gs_gen_pinhole_scan(int n, GsEnsemble** out);
int gs_gen_sandpaper_speckle(int J, int n, double fov_mm, uint64_t seed,
                             const char* seed_label, GsEnsemble** out);

/* Gaussian correlation shaping (periodic convolution, sigma in pixels). */
int gs_blur_masks(const GsEnsemble* ens, double sigma_g_px, GsEnsemble** out);

/* First J masks / cyclic repetition to J masks. */
int gs_take_prefix(const GsEnsemble* ens, int J, GsEnsemble** out);
int gs_tile_to(const GsEnsemble* ens, int J, GsEnsemble** out);

/* Assemble an ensemble from individual mask images (e.g. loaded from
 * disk): create, push J masks, then finalize to recompute statistics. */
int gs_ensemble_create(int family, GsEnsemble** out);
int gs_ensemble_push_mask(GsEnsemble* ens, const GsImage* mask);
int gs_ensemble_finalize(GsEnsemble* ens);

void gs_ensemble_destroy(GsEnsemble* ens);

int gs_ensemble_n(const GsEnsemble* ens, int* out);
int gs_ensemble_count(const GsEnsemble* ens, int* out);
int gs_ensemble_family(const GsEnsemble* ens, int* out);
/* has_constant_sum/constant_sum may be NULL when not wanted. */
int gs_ensemble_stats(const GsEnsemble* ens, double* mu_A, double* sigma_A,
                      int* has_constant_sum, double* constant_sum);
/* Clone of mask j. */
int gs_ensemble_mask(const GsEnsemble* ens, int j, GsImage** out);

/* Point-spread-function weight of the ensemble (exact for structured
 * scans, streaming estimate otherwise). */
int gs_compute_gamma(const GsEnsemble* ens, double* out);

/* Radially averaged g2: peak value and FWHM of g2 - 1 in mm.  The profile
 * itself can be fetched with gs_g2_values (capacity 0 queries the length). */
int gs_g2_profile(const GsEnsemble* ens, double* g2_max, double* fwhm_mm);
int gs_g2_values(const GsEnsemble* ens, double* radius_mm, double* value,
                 int capacity, int* count);

/* ---------------------------------------------------------------- buckets */

/* Wrap externally produced bucket values (e.g. parsed from a CSV). */
int gs_buckets_create(int J, const double* values, double exposure_s,
                      double photon_scale, GsBuckets** out);
void gs_buckets_destroy(GsBuckets* buckets);

int gs_buckets_count(const GsBuckets* buckets, int* out);
int gs_buckets_value(const GsBuckets* buckets, int j, double* out);
/* Copies all J values into `out` (must hold J doubles). */
int gs_buckets_values(const GsBuckets* buckets, double* out);
int gs_buckets_exposure_s(const GsBuckets* buckets, double* out);
int gs_buckets_photon_scale(const GsBuckets* buckets, double* out);

/* Noise-free expected buckets with photon scale B t0 pitch^2 (pitch_mm <= 0
 * selects the ensemble pitch). */
int gs_expected_buckets(const GsImage* object, const GsEnsemble* ens, double flux_B,
                        double t0_s, double pitch_mm, GsBuckets** out);

/* Measurement noise on bucket values. */
int gs_apply_noise(const GsBuckets* buckets, int noise_kind, double sigma_p,
                   double sigma_m, uint64_t seed, const char* seed_label,
                   GsBuckets** out);

/* Dose-matched reference modalities (per-pixel noise, transmission units). */
int gs_simulate_direct(const GsImage* object, double dose_px, int noise_kind,
                       double sigma_p, double sigma_m, uint64_t seed,
                       const char* seed_label, GsImage** out);
int gs_simulate_scan_probe(const GsImage* object, double dwell_photons,
                           int noise_kind, double sigma_p, double sigma_m,
                           uint64_t seed, const char* seed_label, GsImage** out);

/* ---------------------------------------------------------- reconstruction */

int gs_xc(const GsEnsemble* ens, const GsBuckets* buckets, GsImage** out);
int gs_scaled_xc(const GsEnsemble* ens, const GsBuckets* buckets, GsImage** out);
int gs_landweber(const GsEnsemble* ens, const GsBuckets* buckets, double alpha,
                 int iterations, GsImage** out);
int gs_pinv_recon(const GsEnsemble* ens, const GsBuckets* buckets, int max_pixels,
                  double ridge_scale, GsImage** out);

/* ---------------------------------------------------------------- analysis */

int gs_greens(const GsEnsemble* ens, int x_star, int y_star, GsImage** out);
int gs_psf(const GsEnsemble* ens, GsImage** out);
int gs_predict_via_psf(const GsImage* object, const GsImage* psf, GsImage** out);

int gs_rmse_snr(const GsImage* recon, const GsImage* reference, double* rmse,
                double* snr);

/* Inputs of the closed-form signal-to-noise laws. */
typedef struct GsTheoryParams {
    int J;
    int n;
    double mu_A;
    double sigma_A;
    double mu_T;
    double sigma_T;
    double P;       /* total detected photons */
    double sigma_p; /* Poisson gain */
    double sigma_m; /* Gaussian read noise (photons) */
} GsTheoryParams;

int gs_theory_snr0_random(const GsTheoryParams* params, double* out);
int gs_theory_snr0_ortho(const GsTheoryParams* params, double* out);
int gs_theory_snr_noise(const GsTheoryParams* params, int family, double* rmse_0,
                        double* rmse_p, double* rmse_m, double* snr);
int gs_j_opt(const GsTheoryParams* params, double* out);
int gs_comparison_ratios(const GsTheoryParams* params, double* sp_gauss,
                         double* di_gauss, double* sp_poisson, double* di_poisson);

/* ------------------------------------------------------------------ sweeps */

typedef struct GsNoiseSpec {
    int kind; /* GsNoiseKind */
    double sigma_p;
    double sigma_m;
} GsNoiseSpec;

typedef struct GsSweepSpec {
    const char* sweep_name;
    const char* varied_param; /* J, n, mu_A, sigma_A, mu_T, sigma_T, P_over_J */
    const double* values;
    int n_values;

    int J;
    int n;
    double mu_A;
    double sigma_A;
    const int* families; /* GsMaskFamily values */
    int n_families;
    double sigma_g_px;
    const GsNoiseSpec* noises;
    int n_noises;
    int seeds;
    uint64_t root_seed;
    const char* root_label;

    int budget_mode; /* GsBudgetMode */
    double flux_B;
    double t0_s;
    double tau_s;
    double pitch_mm;

    int object_kind; /* GsObjectKind */
    double mu_T;
    double sigma_T;

    int recon; /* GsReconMethod */
    double landweber_alpha;
    int landweber_iterations;
} GsSweepSpec;

/* Fill `spec` with the library defaults (single noise-free random-binary
 * point; array pointers are set to NULL and must be provided by the
 * caller when non-empty). */
int gs_sweep_spec_defaults(GsSweepSpec* spec);

int gs_run_sweep(const GsSweepSpec* spec, GsRecords** out);
void gs_records_destroy(GsRecords* records);
int gs_records_count(const GsRecords* records, int* out);
/* Complete CSV table (header + rows); the string is owned by the handle. */
int gs_records_csv(const GsRecords* records, const char** out);
int gs_records_write_csv(const GsRecords* records, const char* path);

/* --------------------------------------------------------- CCD experiment */

typedef struct GsCcdConfig {
    int rows;
    int cols;
    double readout_s;
    int binning;
    int cleared_before_exposure; /* boolean */
    double rotation_deg;
} GsCcdConfig;

/* Frame-transfer read-out smear of an expected-rate frame. */
int gs_readout_smear(const GsImage* rate, double t0_s, const GsCcdConfig* ccd,
                     GsImage** out);

/* One noisy CCD frame of the tabletop acquisition. */
int gs_zhang_frame(const GsImage* object, const GsImage* mask, double t0_s,
                   const GsCcdConfig* ccd, int shutter, uint64_t seed,
                   const char* seed_label, GsImage** out);

/* Collapse a frame to a bucket value; row ranges are used by the crop and
 * dark-field mitigation modes (row_end 0 means "all rows"). */
int gs_frame_to_bucket(const GsImage* frame, int mitigation, int row_begin,
                       int row_end, int dark_row_begin, int dark_row_end,
                       double* out);

/* Replicate one arm of the tabletop experiment (GS_ZHANG_*). */
int gs_run_zhang(int experiment, int shutter, uint64_t seed, const char* seed_label,
                 int J, GsZhang** out);
void gs_zhang_destroy(GsZhang* zhang);

int gs_zhang_r(const GsZhang* zhang, double* r, double* r_control);
int gs_zhang_t0_s(const GsZhang* zhang, double* out);
int gs_zhang_ccd(const GsZhang* zhang, GsCcdConfig* out);
int gs_zhang_recon(const GsZhang* zhang, GsImage** out);
int gs_zhang_reference(const GsZhang* zhang, GsImage** out);
int gs_zhang_sample_frame(const GsZhang* zhang, GsImage** out);
int gs_zhang_buckets(const GsZhang* zhang, GsBuckets** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GHOSTSIM_GHOSTSIM_H_ */
