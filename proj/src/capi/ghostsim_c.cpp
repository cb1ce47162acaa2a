// SPDX-License-Identifier: Apache-2.0
//
// C API implementation: thin handle wrappers over the C++ core with
// exceptions mapped to status codes and a thread-local error message.

#include "ghostsim/ghostsim.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "ghostsim/analysis.hpp"
#include "ghostsim/ccd.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/forward.hpp"
#include "ghostsim/io.hpp"
#include "ghostsim/masks.hpp"
#include "ghostsim/recon.hpp"

struct GsImage {
    ghostsim::Image image;
};
struct GsEnsemble {
    ghostsim::MaskEnsemble ens;
};
struct GsBuckets {
    ghostsim::BucketVector buckets;
};
struct GsRecords {
    std::vector<ghostsim::SnrRecord> records;
    std::string csv;
};
struct GsZhang {
    ghostsim::ZhangResult result;
};

namespace {

thread_local std::string g_last_error;

void set_error(std::string msg) { g_last_error = std::move(msg); }

template <typename Fn>
int guard(Fn&& fn) noexcept {
    try {
        fn();
        return GS_OK;
    } catch (const ghostsim::InvalidArgument& e) {
        set_error(e.what());
        return GS_E_INVALID_ARGUMENT;
    } catch (const ghostsim::DimensionMismatch& e) {
        set_error(e.what());
        return GS_E_DIMENSION_MISMATCH;
    } catch (const ghostsim::NumericError& e) {
        set_error(e.what());
        return GS_E_NUMERIC;
    } catch (const ghostsim::IoError& e) {
        set_error(e.what());
        return GS_E_IO;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return GS_E_NOMEM;
    } catch (const std::exception& e) {
        set_error(e.what());
        return GS_E_UNKNOWN;
    } catch (...) {
        set_error("unknown error");
        return GS_E_UNKNOWN;
    }
}

int null_arg(const char* name) {
    set_error(std::string("null argument: ") + name);
    return GS_E_INVALID_ARGUMENT;
}

#define GS_REQUIRE(ptr)                                                                \
    do {                                                                               \
        if (!(ptr)) return null_arg(#ptr);                                             \
    } while (0)

ghostsim::Seed make_seed(uint64_t value, const char* label) {
    return ghostsim::Seed{value, label ? std::string(label) : std::string()};
}

ghostsim::MaskFamily to_family(int family) {
    switch (family) {
        case GS_MASK_RANDOM_BINARY: return ghostsim::MaskFamily::RandomBinary;
        case GS_MASK_RANDOM_GRAY: return ghostsim::MaskFamily::RandomGray;
        case GS_MASK_BLURRED: return ghostsim::MaskFamily::Blurred;
        case GS_MASK_HADAMARD: return ghostsim::MaskFamily::Hadamard;
        case GS_MASK_URA_SCAN: return ghostsim::MaskFamily::UraScan;
        case GS_MASK_PINHOLE_SCAN: return ghostsim::MaskFamily::PinholeScan;
    }
    throw ghostsim::InvalidArgument("unknown mask family code " + std::to_string(family));
}

int from_family(ghostsim::MaskFamily family) {
    switch (family) {
        case ghostsim::MaskFamily::RandomBinary: return GS_MASK_RANDOM_BINARY;
        case ghostsim::MaskFamily::RandomGray: return GS_MASK_RANDOM_GRAY;
        case ghostsim::MaskFamily::Blurred: return GS_MASK_BLURRED;
        case ghostsim::MaskFamily::Hadamard: return GS_MASK_HADAMARD;
        case ghostsim::MaskFamily::UraScan: return GS_MASK_URA_SCAN;
        case ghostsim::MaskFamily::PinholeScan: return GS_MASK_PINHOLE_SCAN;
    }
    throw ghostsim::InvalidArgument("unknown mask family");
}

ghostsim::NoiseKind to_noise_kind(int kind) {
    switch (kind) {
        case GS_NOISE_NONE: return ghostsim::NoiseKind::None;
        case GS_NOISE_POISSON: return ghostsim::NoiseKind::Poisson;
        case GS_NOISE_GAUSSIAN: return ghostsim::NoiseKind::Gaussian;
        case GS_NOISE_BOTH: return ghostsim::NoiseKind::Both;
    }
    throw ghostsim::InvalidArgument("unknown noise kind code " + std::to_string(kind));
}

ghostsim::NoiseSpec to_noise_spec(int kind, double sigma_p, double sigma_m) {
    ghostsim::NoiseSpec spec{to_noise_kind(kind), sigma_p, sigma_m};
    spec.validate();
    return spec;
}

ghostsim::TheoryParams to_theory(const GsTheoryParams& p) {
    ghostsim::TheoryParams out;
    out.J = p.J;
    out.n = p.n;
    out.mu_A = p.mu_A;
    out.sigma_A = p.sigma_A;
    out.mu_T = p.mu_T;
    out.sigma_T = p.sigma_T;
    out.P = p.P;
    out.sigma_p = p.sigma_p;
    out.sigma_m = p.sigma_m;
    return out;
}

ghostsim::TheoryFamily to_theory_family(int family) {
    switch (family) {
        case GS_THEORY_RANDOM: return ghostsim::TheoryFamily::Random;
        case GS_THEORY_ORTHOGONAL: return ghostsim::TheoryFamily::Orthogonal;
    }
    throw ghostsim::InvalidArgument("unknown theory family code " + std::to_string(family));
}

ghostsim::CcdConfig to_ccd(const GsCcdConfig& c) {
    ghostsim::CcdConfig out;
    out.rows = c.rows;
    out.cols = c.cols;
    out.readout_s = c.readout_s;
    out.binning = c.binning;
    out.cleared_before_exposure = c.cleared_before_exposure != 0;
    out.rotation_deg = c.rotation_deg;
    return out;
}

int emit_image(ghostsim::Image image, GsImage** out) {
    *out = new GsImage{std::move(image)};
    return GS_OK;
}

} // namespace

extern "C" {

const char* gs_version(void) { return "0.1.0"; }

const char* gs_last_error(void) { return g_last_error.c_str(); }

const char* gs_status_name(int status) {
    switch (status) {
        case GS_OK: return "GS_OK";
        case GS_E_INVALID_ARGUMENT: return "GS_E_INVALID_ARGUMENT";
        case GS_E_DIMENSION_MISMATCH: return "GS_E_DIMENSION_MISMATCH";
        case GS_E_NUMERIC: return "GS_E_NUMERIC";
        case GS_E_IO: return "GS_E_IO";
        case GS_E_NOMEM: return "GS_E_NOMEM";
        case GS_E_UNKNOWN: return "GS_E_UNKNOWN";
    }
    return "GS_E_INVALID_STATUS";
}

int gs_mask_family_name(int family, const char** out) {
    GS_REQUIRE(out);
    return guard([&] { *out = ghostsim::mask_family_name(to_family(family)); });
}

int gs_mask_family_from_name(const char* name, int* out) {
    GS_REQUIRE(name);
    GS_REQUIRE(out);
    return guard([&] {
        for (int f = GS_MASK_RANDOM_BINARY; f <= GS_MASK_PINHOLE_SCAN; ++f) {
            if (std::strcmp(name, ghostsim::mask_family_name(to_family(f))) == 0) {
                *out = f;
                return;
            }
        }
        throw ghostsim::InvalidArgument(std::string("unknown mask family name '") + name +
                                        "'");
    });
}

/* ----------------------------------------------------------------- images */

int gs_image_create(int rows, int cols, double pitch_mm, GsImage** out) {
    GS_REQUIRE(out);
    return guard([&] { *out = new GsImage{ghostsim::Image(rows, cols, pitch_mm)}; });
}

void gs_image_destroy(GsImage* img) { delete img; }

int gs_image_clone(const GsImage* img, GsImage** out) {
    GS_REQUIRE(img);
    GS_REQUIRE(out);
    return guard([&] { *out = new GsImage{img->image}; });
}

int gs_image_rows(const GsImage* img, int* out) {
    GS_REQUIRE(img);
    GS_REQUIRE(out);
    *out = img->image.rows();
    return GS_OK;
}

int gs_image_cols(const GsImage* img, int* out) {
    GS_REQUIRE(img);
    GS_REQUIRE(out);
    *out = img->image.cols();
    return GS_OK;
}

int gs_image_pitch_mm(const GsImage* img, double* out) {
    GS_REQUIRE(img);
    GS_REQUIRE(out);
    *out = img->image.pitch_mm();
    return GS_OK;
}

int gs_image_data(GsImage* img, double** out) {
    GS_REQUIRE(img);
    GS_REQUIRE(out);
    *out = img->image.data().data();
    return GS_OK;
}

int gs_image_get(const GsImage* img, int row, int col, double* out) {
    GS_REQUIRE(img);
    GS_REQUIRE(out);
    if (row < 0 || row >= img->image.rows() || col < 0 || col >= img->image.cols()) {
        set_error("image index (" + std::to_string(row) + ", " + std::to_string(col) +
                  ") out of bounds");
        return GS_E_INVALID_ARGUMENT;
    }
    *out = img->image.at(row, col);
    return GS_OK;
}

int gs_image_set(GsImage* img, int row, int col, double value) {
    GS_REQUIRE(img);
    if (row < 0 || row >= img->image.rows() || col < 0 || col >= img->image.cols()) {
        set_error("image index (" + std::to_string(row) + ", " + std::to_string(col) +
                  ") out of bounds");
        return GS_E_INVALID_ARGUMENT;
    }
    img->image.at(row, col) = value;
    return GS_OK;
}

int gs_image_stats(const GsImage* img, double* mu, double* sigma) {
    GS_REQUIRE(img);
    return guard([&] {
        const ghostsim::ImageStats st = ghostsim::image_stats(img->image);
        if (mu) *mu = st.mu;
        if (sigma) *sigma = st.sigma;
    });
}

int gs_image_write_pgm16(const GsImage* img, const char* path, double lo, double hi) {
    GS_REQUIRE(img);
    GS_REQUIRE(path);
    return guard([&] { ghostsim::write_pgm16(img->image, path, lo, hi); });
}

int gs_image_read_pgm16(const char* path, GsImage** out, double* lo, double* hi) {
    GS_REQUIRE(path);
    GS_REQUIRE(out);
    return guard([&] {
        ghostsim::PgmImage pgm = ghostsim::read_pgm16(path);
        if (lo) *lo = pgm.lo;
        if (hi) *hi = pgm.hi;
        emit_image(std::move(pgm.image), out);
    });
}

/* ---------------------------------------------------------------- objects */

int gs_make_uniform_object(int n, double mu, double sigma, uint64_t seed,
                           const char* seed_label, GsImage** out) {
    GS_REQUIRE(out);
    return guard([&] {
        emit_image(ghostsim::make_uniform_object(n, mu, sigma, make_seed(seed, seed_label)),
                   out);
    });
}

int gs_make_two_level_stencil(int n, double frac_hi, double lo, double hi, GsImage** out) {
    GS_REQUIRE(out);
    return guard(
        [&] { emit_image(ghostsim::make_two_level_stencil(n, frac_hi, lo, hi), out); });
}

int gs_make_stencil(int n, double rotation_deg, GsImage** out) {
    GS_REQUIRE(out);
    return guard([&] { emit_image(ghostsim::make_stencil(n, rotation_deg), out); });
}

/* -------------------------------------------------------------- ensembles */

int gs_gen_random_binary(int n, int J, double mu_A, uint64_t seed, const char* seed_label,
                         GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] {
        *out = new GsEnsemble{ghostsim::gen_random_binary(n, J, mu_A,
                                                          make_seed(seed, seed_label))};
    });
}

int gs_gen_random_gray(int n, int J, double mu_A, double sigma_A, uint64_t seed,
                       const char* seed_label, GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] {
        *out = new GsEnsemble{ghostsim::gen_random_gray(n, J, mu_A, sigma_A,
                                                        make_seed(seed, seed_label))};
    });
}

int gs_gen_hadamard(int n, GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] { *out = new GsEnsemble{ghostsim::gen_hadamard(n)}; });
}

int gs_gen_ura_scan(int p, GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] { *out = new GsEnsemble{ghostsim::gen_ura_scan(p)}; });
}

int gs_gen_pinhole_scan(int n, GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] { *out = new GsEnsemble{ghostsim::gen_pinhole_scan(n)}; });
}

int gs_gen_sandpaper_speckle(int J, int n, double fov_mm, uint64_t seed,
                             const char* seed_label, GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] {
        *out = new GsEnsemble{ghostsim::gen_sandpaper_speckle(J, n, fov_mm,
                                                              make_seed(seed, seed_label))};
    });
}

int gs_blur_masks(const GsEnsemble* ens, double sigma_g_px, GsEnsemble** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { *out = new GsEnsemble{ghostsim::blur_masks(ens->ens, sigma_g_px)}; });
}

int gs_take_prefix(const GsEnsemble* ens, int J, GsEnsemble** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { *out = new GsEnsemble{ghostsim::take_prefix(ens->ens, J)}; });
}

int gs_tile_to(const GsEnsemble* ens, int J, GsEnsemble** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { *out = new GsEnsemble{ghostsim::tile_to(ens->ens, J)}; });
}

int gs_ensemble_create(int family, GsEnsemble** out) {
    GS_REQUIRE(out);
    return guard([&] {
        auto handle = std::make_unique<GsEnsemble>();
        handle->ens.family = to_family(family);
        *out = handle.release();
    });
}

int gs_ensemble_push_mask(GsEnsemble* ens, const GsImage* mask) {
    GS_REQUIRE(ens);
    GS_REQUIRE(mask);
    return guard([&] {
        const int n = mask->image.n(); // also rejects rectangular masks
        if (!ens->ens.masks.empty() && ens->ens.masks.front().n() != n)
            throw ghostsim::DimensionMismatch(
                "gs_ensemble_push_mask: mask side " + std::to_string(n) +
                " differs from the ensemble's " +
                std::to_string(ens->ens.masks.front().n()));
        ens->ens.masks.push_back(mask->image);
    });
}

int gs_ensemble_finalize(GsEnsemble* ens) {
    GS_REQUIRE(ens);
    return guard([&] { ghostsim::refresh_stats(ens->ens); });
}

void gs_ensemble_destroy(GsEnsemble* ens) { delete ens; }

int gs_ensemble_n(const GsEnsemble* ens, int* out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    *out = ens->ens.n;
    return GS_OK;
}

int gs_ensemble_count(const GsEnsemble* ens, int* out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    *out = ens->ens.J;
    return GS_OK;
}

int gs_ensemble_family(const GsEnsemble* ens, int* out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { *out = from_family(ens->ens.family); });
}

int gs_ensemble_stats(const GsEnsemble* ens, double* mu_A, double* sigma_A,
                      int* has_constant_sum, double* constant_sum) {
    GS_REQUIRE(ens);
    if (mu_A) *mu_A = ens->ens.mu_A;
    if (sigma_A) *sigma_A = ens->ens.sigma_A;
    if (has_constant_sum) *has_constant_sum = ens->ens.constant_sum.has_value() ? 1 : 0;
    if (constant_sum) *constant_sum = ens->ens.constant_sum.value_or(0.0);
    return GS_OK;
}

int gs_ensemble_mask(const GsEnsemble* ens, int j, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    if (j < 0 || j >= static_cast<int>(ens->ens.masks.size())) {
        set_error("mask index " + std::to_string(j) + " out of bounds (J = " +
                  std::to_string(ens->ens.masks.size()) + ")");
        return GS_E_INVALID_ARGUMENT;
    }
    return guard([&] { emit_image(ens->ens.masks[j], out); });
}

int gs_compute_gamma(const GsEnsemble* ens, double* out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { *out = ghostsim::compute_gamma(ens->ens); });
}

int gs_g2_profile(const GsEnsemble* ens, double* g2_max, double* fwhm_mm) {
    GS_REQUIRE(ens);
    return guard([&] {
        const ghostsim::G2Profile g2 = ghostsim::g2_profile(ens->ens);
        if (g2_max) *g2_max = g2.max;
        if (fwhm_mm) *fwhm_mm = g2.fwhm_mm;
    });
}

int gs_g2_values(const GsEnsemble* ens, double* radius_mm, double* value, int capacity,
                 int* count) {
    GS_REQUIRE(ens);
    GS_REQUIRE(count);
    return guard([&] {
        const ghostsim::G2Profile g2 = ghostsim::g2_profile(ens->ens);
        *count = static_cast<int>(g2.value.size());
        const int copy = std::min(capacity, *count);
        for (int i = 0; i < copy; ++i) {
            if (radius_mm) radius_mm[i] = g2.radius_mm[i];
            if (value) value[i] = g2.value[i];
        }
    });
}

/* ---------------------------------------------------------------- buckets */

int gs_buckets_create(int J, const double* values, double exposure_s, double photon_scale,
                      GsBuckets** out) {
    GS_REQUIRE(values);
    GS_REQUIRE(out);
    return guard([&] {
        if (J < 1) throw ghostsim::InvalidArgument("gs_buckets_create: J must be positive");
        auto handle = std::make_unique<GsBuckets>();
        handle->buckets.J = J;
        handle->buckets.values.assign(values, values + J);
        handle->buckets.exposure_s = exposure_s;
        handle->buckets.photon_scale = photon_scale;
        *out = handle.release();
    });
}

void gs_buckets_destroy(GsBuckets* buckets) { delete buckets; }

int gs_buckets_count(const GsBuckets* buckets, int* out) {
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    *out = buckets->buckets.J;
    return GS_OK;
}

int gs_buckets_value(const GsBuckets* buckets, int j, double* out) {
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    if (j < 0 || j >= buckets->buckets.J) {
        set_error("bucket index " + std::to_string(j) + " out of bounds (J = " +
                  std::to_string(buckets->buckets.J) + ")");
        return GS_E_INVALID_ARGUMENT;
    }
    *out = buckets->buckets.values[j];
    return GS_OK;
}

int gs_buckets_values(const GsBuckets* buckets, double* out) {
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    for (int j = 0; j < buckets->buckets.J; ++j) out[j] = buckets->buckets.values[j];
    return GS_OK;
}

int gs_buckets_exposure_s(const GsBuckets* buckets, double* out) {
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    *out = buckets->buckets.exposure_s;
    return GS_OK;
}

int gs_buckets_photon_scale(const GsBuckets* buckets, double* out) {
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    *out = buckets->buckets.photon_scale;
    return GS_OK;
}

int gs_expected_buckets(const GsImage* object, const GsEnsemble* ens, double flux_B,
                        double t0_s, double pitch_mm, GsBuckets** out) {
    GS_REQUIRE(object);
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] {
        ghostsim::PhotonBudget budget;
        budget.flux_B = flux_B;
        budget.t0_s = t0_s;
        budget.J = ens->ens.J;
        budget.pitch_mm = pitch_mm > 0.0 ? pitch_mm : ens->ens.pitch_mm();
        *out = new GsBuckets{ghostsim::expected_buckets(object->image, ens->ens, budget)};
    });
}

int gs_apply_noise(const GsBuckets* buckets, int noise_kind, double sigma_p, double sigma_m,
                   uint64_t seed, const char* seed_label, GsBuckets** out) {
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    return guard([&] {
        *out = new GsBuckets{ghostsim::apply_noise(buckets->buckets,
                                                   to_noise_spec(noise_kind, sigma_p, sigma_m),
                                                   make_seed(seed, seed_label))};
    });
}

int gs_simulate_direct(const GsImage* object, double dose_px, int noise_kind, double sigma_p,
                       double sigma_m, uint64_t seed, const char* seed_label, GsImage** out) {
    GS_REQUIRE(object);
    GS_REQUIRE(out);
    return guard([&] {
        emit_image(ghostsim::simulate_direct(object->image, dose_px,
                                             to_noise_spec(noise_kind, sigma_p, sigma_m),
                                             make_seed(seed, seed_label)),
                   out);
    });
}

int gs_simulate_scan_probe(const GsImage* object, double dwell_photons, int noise_kind,
                           double sigma_p, double sigma_m, uint64_t seed,
                           const char* seed_label, GsImage** out) {
    GS_REQUIRE(object);
    GS_REQUIRE(out);
    return guard([&] {
        emit_image(ghostsim::simulate_scan_probe(object->image, dwell_photons,
                                                 to_noise_spec(noise_kind, sigma_p, sigma_m),
                                                 make_seed(seed, seed_label)),
                   out);
    });
}

/* --------------------------------------------------------- reconstruction */

int gs_xc(const GsEnsemble* ens, const GsBuckets* buckets, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    return guard([&] { emit_image(ghostsim::xc(ens->ens, buckets->buckets), out); });
}

int gs_scaled_xc(const GsEnsemble* ens, const GsBuckets* buckets, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    return guard([&] { emit_image(ghostsim::scaled_xc(ens->ens, buckets->buckets), out); });
}

int gs_landweber(const GsEnsemble* ens, const GsBuckets* buckets, double alpha,
                 int iterations, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    return guard([&] {
        emit_image(ghostsim::landweber(ens->ens, buckets->buckets, alpha, iterations), out);
    });
}

int gs_pinv_recon(const GsEnsemble* ens, const GsBuckets* buckets, int max_pixels,
                  double ridge_scale, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(buckets);
    GS_REQUIRE(out);
    return guard([&] {
        ghostsim::PinvOptions opts;
        if (max_pixels > 0) opts.max_pixels = max_pixels;
        if (ridge_scale >= 0.0) opts.ridge_scale = ridge_scale;
        emit_image(ghostsim::pinv_recon(ens->ens, buckets->buckets, opts), out);
    });
}

/* ---------------------------------------------------------------- analysis */

int gs_greens(const GsEnsemble* ens, int x_star, int y_star, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { emit_image(ghostsim::greens(ens->ens, x_star, y_star), out); });
}

int gs_psf(const GsEnsemble* ens, GsImage** out) {
    GS_REQUIRE(ens);
    GS_REQUIRE(out);
    return guard([&] { emit_image(ghostsim::psf(ens->ens), out); });
}

int gs_predict_via_psf(const GsImage* object, const GsImage* psf, GsImage** out) {
    GS_REQUIRE(object);
    GS_REQUIRE(psf);
    GS_REQUIRE(out);
    return guard(
        [&] { emit_image(ghostsim::predict_via_psf(object->image, psf->image), out); });
}

int gs_rmse_snr(const GsImage* recon, const GsImage* reference, double* rmse, double* snr) {
    GS_REQUIRE(recon);
    GS_REQUIRE(reference);
    return guard([&] {
        const ghostsim::RmseSnr rs = ghostsim::rmse_snr(recon->image, reference->image);
        if (rmse) *rmse = rs.rmse;
        if (snr) *snr = rs.snr;
    });
}

int gs_theory_snr0_random(const GsTheoryParams* params, double* out) {
    GS_REQUIRE(params);
    GS_REQUIRE(out);
    return guard([&] { *out = ghostsim::theory_snr0_random(to_theory(*params)); });
}

int gs_theory_snr0_ortho(const GsTheoryParams* params, double* out) {
    GS_REQUIRE(params);
    GS_REQUIRE(out);
    return guard([&] { *out = ghostsim::theory_snr0_ortho(to_theory(*params)); });
}

int gs_theory_snr_noise(const GsTheoryParams* params, int family, double* rmse_0,
                        double* rmse_p, double* rmse_m, double* snr) {
    GS_REQUIRE(params);
    return guard([&] {
        const ghostsim::NoiseSnr ns =
            ghostsim::theory_snr_noise(to_theory(*params), to_theory_family(family));
        if (rmse_0) *rmse_0 = ns.rmse_0;
        if (rmse_p) *rmse_p = ns.rmse_p;
        if (rmse_m) *rmse_m = ns.rmse_m;
        if (snr) *snr = ns.snr;
    });
}

int gs_j_opt(const GsTheoryParams* params, double* out) {
    GS_REQUIRE(params);
    GS_REQUIRE(out);
    return guard([&] { *out = ghostsim::j_opt(to_theory(*params)); });
}

int gs_comparison_ratios(const GsTheoryParams* params, double* sp_gauss, double* di_gauss,
                         double* sp_poisson, double* di_poisson) {
    GS_REQUIRE(params);
    return guard([&] {
        const ghostsim::ComparisonRatios cr = ghostsim::comparison_ratios(to_theory(*params));
        if (sp_gauss) *sp_gauss = cr.sp_gauss;
        if (di_gauss) *di_gauss = cr.di_gauss;
        if (sp_poisson) *sp_poisson = cr.sp_poisson;
        if (di_poisson) *di_poisson = cr.di_poisson;
    });
}

/* ------------------------------------------------------------------ sweeps */

int gs_sweep_spec_defaults(GsSweepSpec* spec) {
    GS_REQUIRE(spec);
    const ghostsim::SweepConfig defaults;
    *spec = GsSweepSpec{};
    spec->sweep_name = "sweep";
    spec->varied_param = "J";
    spec->values = nullptr;
    spec->n_values = 0;
    spec->J = defaults.J;
    spec->n = defaults.n;
    spec->mu_A = defaults.mu_A;
    spec->sigma_A = defaults.sigma_A;
    spec->families = nullptr;
    spec->n_families = 0;
    spec->sigma_g_px = defaults.sigma_g_px;
    spec->noises = nullptr;
    spec->n_noises = 0;
    spec->seeds = defaults.seeds;
    spec->root_seed = defaults.root_seed.value;
    spec->root_label = "sweep";
    spec->budget_mode = GS_BUDGET_NOISE_FREE;
    spec->flux_B = defaults.flux_B;
    spec->t0_s = defaults.t0_s;
    spec->tau_s = defaults.tau_s;
    spec->pitch_mm = defaults.pitch_mm;
    spec->object_kind = GS_OBJECT_UNIFORM_RANDOM;
    spec->mu_T = defaults.mu_T;
    spec->sigma_T = defaults.sigma_T;
    spec->recon = GS_RECON_SCALED_XC;
    spec->landweber_alpha = defaults.landweber_alpha;
    spec->landweber_iterations = defaults.landweber_iterations;
    return GS_OK;
}

int gs_run_sweep(const GsSweepSpec* spec, GsRecords** out) {
    GS_REQUIRE(spec);
    GS_REQUIRE(out);
    return guard([&] {
        ghostsim::SweepConfig config;
        config.sweep_name = spec->sweep_name ? spec->sweep_name : "";
        config.varied_param = spec->varied_param ? spec->varied_param : "";
        if (spec->n_values > 0 && !spec->values)
            throw ghostsim::InvalidArgument("gs_run_sweep: values is null");
        config.values.assign(spec->values, spec->values + spec->n_values);
        config.J = spec->J;
        config.n = spec->n;
        config.mu_A = spec->mu_A;
        config.sigma_A = spec->sigma_A;
        if (spec->n_families > 0) {
            if (!spec->families)
                throw ghostsim::InvalidArgument("gs_run_sweep: families is null");
            config.families.clear();
            for (int i = 0; i < spec->n_families; ++i)
                config.families.push_back(to_family(spec->families[i]));
        }
        config.sigma_g_px = spec->sigma_g_px;
        if (spec->n_noises > 0) {
            if (!spec->noises) throw ghostsim::InvalidArgument("gs_run_sweep: noises is null");
            config.noises.clear();
            for (int i = 0; i < spec->n_noises; ++i)
                config.noises.push_back(to_noise_spec(spec->noises[i].kind,
                                                      spec->noises[i].sigma_p,
                                                      spec->noises[i].sigma_m));
        }
        config.seeds = spec->seeds;
        config.root_seed = make_seed(spec->root_seed, spec->root_label);
        switch (spec->budget_mode) {
            case GS_BUDGET_CONSTANT_T0:
                config.budget_mode = ghostsim::BudgetMode::ConstantT0;
                break;
            case GS_BUDGET_CONSTANT_TAU:
                config.budget_mode = ghostsim::BudgetMode::ConstantTau;
                break;
            case GS_BUDGET_NOISE_FREE:
                config.budget_mode = ghostsim::BudgetMode::NoiseFree;
                break;
            default:
                throw ghostsim::InvalidArgument("unknown budget mode code " +
                                                std::to_string(spec->budget_mode));
        }
        config.flux_B = spec->flux_B;
        config.t0_s = spec->t0_s;
        config.tau_s = spec->tau_s;
        config.pitch_mm = spec->pitch_mm;
        switch (spec->object_kind) {
            case GS_OBJECT_UNIFORM_RANDOM:
                config.object = ghostsim::ObjectKind::UniformRandom;
                break;
            case GS_OBJECT_TWO_LEVEL_STENCIL:
                config.object = ghostsim::ObjectKind::TwoLevelStencil;
                break;
            default:
                throw ghostsim::InvalidArgument("unknown object kind code " +
                                                std::to_string(spec->object_kind));
        }
        config.mu_T = spec->mu_T;
        config.sigma_T = spec->sigma_T;
        switch (spec->recon) {
            case GS_RECON_XC: config.recon = ghostsim::ReconMethod::Xc; break;
            case GS_RECON_SCALED_XC: config.recon = ghostsim::ReconMethod::ScaledXc; break;
            case GS_RECON_LANDWEBER: config.recon = ghostsim::ReconMethod::Landweber; break;
            case GS_RECON_PINV: config.recon = ghostsim::ReconMethod::Pinv; break;
            default:
                throw ghostsim::InvalidArgument("unknown reconstruction method code " +
                                                std::to_string(spec->recon));
        }
        config.landweber_alpha = spec->landweber_alpha;
        config.landweber_iterations = spec->landweber_iterations;

        auto handle = std::make_unique<GsRecords>();
        handle->records = ghostsim::run_sweep(config);
        handle->csv = ghostsim::sweep_csv_string(handle->records);
        *out = handle.release();
    });
}

void gs_records_destroy(GsRecords* records) { delete records; }

int gs_records_count(const GsRecords* records, int* out) {
    GS_REQUIRE(records);
    GS_REQUIRE(out);
    *out = static_cast<int>(records->records.size());
    return GS_OK;
}

int gs_records_csv(const GsRecords* records, const char** out) {
    GS_REQUIRE(records);
    GS_REQUIRE(out);
    *out = records->csv.c_str();
    return GS_OK;
}

int gs_records_write_csv(const GsRecords* records, const char* path) {
    GS_REQUIRE(records);
    GS_REQUIRE(path);
    return guard([&] { ghostsim::write_sweep_csv(records->records, path); });
}

/* --------------------------------------------------------- CCD experiment */

int gs_readout_smear(const GsImage* rate, double t0_s, const GsCcdConfig* ccd,
                     GsImage** out) {
    GS_REQUIRE(rate);
    GS_REQUIRE(ccd);
    GS_REQUIRE(out);
    return guard(
        [&] { emit_image(ghostsim::readout_smear(rate->image, t0_s, to_ccd(*ccd)), out); });
}

int gs_zhang_frame(const GsImage* object, const GsImage* mask, double t0_s,
                   const GsCcdConfig* ccd, int shutter, uint64_t seed,
                   const char* seed_label, GsImage** out) {
    GS_REQUIRE(object);
    GS_REQUIRE(mask);
    GS_REQUIRE(ccd);
    GS_REQUIRE(out);
    return guard([&] {
        emit_image(ghostsim::zhang_frame(object->image, mask->image, t0_s, to_ccd(*ccd),
                                         shutter != 0, make_seed(seed, seed_label)),
                   out);
    });
}

int gs_frame_to_bucket(const GsImage* frame, int mitigation, int row_begin, int row_end,
                       int dark_row_begin, int dark_row_end, double* out) {
    GS_REQUIRE(frame);
    GS_REQUIRE(out);
    return guard([&] {
        ghostsim::SmearMitigation mode;
        switch (mitigation) {
            case GS_SMEAR_NONE: mode = ghostsim::SmearMitigation::None; break;
            case GS_SMEAR_CROP: mode = ghostsim::SmearMitigation::CropSmear; break;
            case GS_SMEAR_DARKFIELD: mode = ghostsim::SmearMitigation::DarkfieldSubtract; break;
            default:
                throw ghostsim::InvalidArgument("unknown smear mitigation code " +
                                                std::to_string(mitigation));
        }
        ghostsim::BucketRegion region;
        region.row_begin = row_begin;
        region.row_end = row_end;
        region.dark_row_begin = dark_row_begin;
        region.dark_row_end = dark_row_end;
        *out = ghostsim::frame_to_bucket(frame->image, mode, region);
    });
}

int gs_run_zhang(int experiment, int shutter, uint64_t seed, const char* seed_label, int J,
                 GsZhang** out) {
    GS_REQUIRE(out);
    return guard([&] {
        ghostsim::ZhangExperiment exp;
        switch (experiment) {
            case GS_ZHANG_I: exp = ghostsim::ZhangExperiment::I; break;
            case GS_ZHANG_II: exp = ghostsim::ZhangExperiment::II; break;
            case GS_ZHANG_III: exp = ghostsim::ZhangExperiment::III; break;
            default:
                throw ghostsim::InvalidArgument("unknown experiment code " +
                                                std::to_string(experiment));
        }
        *out = new GsZhang{
            ghostsim::run_zhang(exp, shutter != 0, make_seed(seed, seed_label), J)};
    });
}

void gs_zhang_destroy(GsZhang* zhang) { delete zhang; }

int gs_zhang_r(const GsZhang* zhang, double* r, double* r_control) {
    GS_REQUIRE(zhang);
    if (r) *r = zhang->result.r;
    if (r_control) *r_control = zhang->result.r_control;
    return GS_OK;
}

int gs_zhang_t0_s(const GsZhang* zhang, double* out) {
    GS_REQUIRE(zhang);
    GS_REQUIRE(out);
    *out = zhang->result.t0_s;
    return GS_OK;
}

int gs_zhang_ccd(const GsZhang* zhang, GsCcdConfig* out) {
    GS_REQUIRE(zhang);
    GS_REQUIRE(out);
    out->rows = zhang->result.ccd.rows;
    out->cols = zhang->result.ccd.cols;
    out->readout_s = zhang->result.ccd.readout_s;
    out->binning = zhang->result.ccd.binning;
    out->cleared_before_exposure = zhang->result.ccd.cleared_before_exposure ? 1 : 0;
    out->rotation_deg = zhang->result.ccd.rotation_deg;
    return GS_OK;
}

int gs_zhang_recon(const GsZhang* zhang, GsImage** out) {
    GS_REQUIRE(zhang);
    GS_REQUIRE(out);
    return guard([&] { emit_image(zhang->result.recon, out); });
}

int gs_zhang_reference(const GsZhang* zhang, GsImage** out) {
    GS_REQUIRE(zhang);
    GS_REQUIRE(out);
    return guard([&] { emit_image(zhang->result.reference, out); });
}

int gs_zhang_sample_frame(const GsZhang* zhang, GsImage** out) {
    GS_REQUIRE(zhang);
    GS_REQUIRE(out);
    return guard([&] { emit_image(zhang->result.sample_frame, out); });
}

int gs_zhang_buckets(const GsZhang* zhang, GsBuckets** out) {
    GS_REQUIRE(zhang);
    GS_REQUIRE(out);
    return guard([&] { *out = new GsBuckets{zhang->result.buckets}; });
}

} // extern "C"
