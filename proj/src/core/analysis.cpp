// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ensemble_util.hpp"
#include "fft.hpp"
#include "ghostsim/random.hpp"
#include "ghostsim/recon.hpp"
#include "glyphs.hpp"

namespace ghostsim {

using detail::accumulate_weighted_masks;
using detail::ensemble_mean_map;

Image greens(const MaskEnsemble& ens, int x_star, int y_star) {
    if (ens.masks.empty()) throw InvalidArgument("greens: empty ensemble");
    const int n = ens.n;
    if (x_star < 0 || x_star >= n || y_star < 0 || y_star >= n)
        throw InvalidArgument("greens: point (" + std::to_string(x_star) + ", " +
                              std::to_string(y_star) + ") outside the " +
                              std::to_string(n) + "px grid");
    const std::vector<double> mean = ensemble_mean_map(ens);
    const size_t star = static_cast<size_t>(y_star) * n + x_star;

    std::vector<double> w(ens.J);
    for (int j = 0; j < ens.J; ++j) w[j] = ens.masks[j].data()[star] - mean[star];
    std::vector<double> acc = accumulate_weighted_masks(ens, w);
    const double w_sum = std::accumulate(w.begin(), w.end(), 0.0);

    Image out = Image::square(n, ens.masks.front().pitch_mm());
    for (size_t x = 0; x < acc.size(); ++x) out.data()[x] = acc[x] - mean[x] * w_sum;
    return out;
}

Image psf(const MaskEnsemble& ens) {
    if (ens.masks.empty()) throw InvalidArgument("psf: empty ensemble");
    const int n = ens.n;
    const size_t px = static_cast<size_t>(n) * n;
    const std::vector<double> mean = ensemble_mean_map(ens);

    // Sum of periodic autocorrelations of the mean-corrected masks,
    // accumulated as a power spectrum (one inverse transform at the end).
    detail::FftWorkspace fft(n, n);
    std::vector<double> power(fft.spectrum_size(), 0.0);
    std::vector<double> centered(px);
    for (const Image& m : ens.masks) {
        for (size_t x = 0; x < px; ++x) centered[x] = m.data()[x] - mean[x];
        fft.forward(centered.data());
        const std::complex<double>* spec = fft.spectrum();
        for (int i = 0; i < fft.spectrum_size(); ++i) power[i] += std::norm(spec[i]);
    }
    std::complex<double>* spec = fft.spectrum();
    for (int i = 0; i < fft.spectrum_size(); ++i) spec[i] = power[i];
    std::vector<double> raw(px);
    fft.inverse(raw.data());

    // Scale by 1/n^2 and center displacement zero on the middle pixel.
    Image out = Image::square(n, ens.masks.front().pitch_mm());
    const double scale = 1.0 / static_cast<double>(px);
    const int cr = n / 2;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out.at(r, c) = raw[static_cast<size_t>((r - cr + n) % n) * n +
                               static_cast<size_t>((c - cr + n) % n)] *
                           scale;
    return out;
}

Image predict_via_psf(const Image& T, const Image& psf_img) {
    const int n = T.n();
    if (psf_img.rows() != n || psf_img.cols() != n)
        throw DimensionMismatch("predict_via_psf: PSF grid does not match the object");
    const size_t px = static_cast<size_t>(n) * n;

    // Undo the centering so the kernel's displacement zero sits at (0,0).
    std::vector<double> kernel(px);
    const int cr = n / 2;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            kernel[static_cast<size_t>(r) * n + c] = psf_img.at((r + cr) % n, (c + cr) % n);

    detail::FftWorkspace fft(n, n);
    fft.forward(kernel.data());
    std::vector<std::complex<double>> kspec(fft.spectrum(),
                                            fft.spectrum() + fft.spectrum_size());
    fft.forward(T.data().data());
    std::complex<double>* spec = fft.spectrum();
    for (int i = 0; i < fft.spectrum_size(); ++i) spec[i] *= kspec[i];

    Image out = Image::square(n, T.pitch_mm());
    fft.inverse(out.data().data());
    return out;
}

RmseSnr rmse_snr(const Image& recon, const Image& reference) {
    if (recon.rows() != reference.rows() || recon.cols() != reference.cols())
        throw DimensionMismatch("rmse_snr: image shapes differ");
    double ss = 0.0;
    for (size_t i = 0; i < recon.size(); ++i) {
        const double d = recon.data()[i] - reference.data()[i];
        ss += d * d;
    }
    RmseSnr out;
    out.rmse = std::sqrt(ss / static_cast<double>(recon.size()));
    out.snr = out.rmse > 0.0 ? 1.0 / out.rmse : std::numeric_limits<double>::infinity();
    return out;
}

namespace {

void check_theory_common(const TheoryParams& p) {
    if (p.J < 1) throw InvalidArgument("theory: J must be at least 1");
    if (p.n < 2) throw InvalidArgument("theory: n must be at least 2");
}

} // namespace

double theory_snr0_random(const TheoryParams& p) {
    check_theory_common(p);
    const double power = p.mu_T * p.mu_T + p.sigma_T * p.sigma_T;
    if (!(power > 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(static_cast<double>(p.J) /
                     (static_cast<double>(p.n) * p.n * power));
}

double theory_snr0_ortho(const TheoryParams& p) {
    check_theory_common(p);
    const double n2 = static_cast<double>(p.n) * p.n;
    if (p.J >= n2 || !(p.sigma_T > 0.0))
        return std::numeric_limits<double>::infinity();
    return std::sqrt(n2 / ((n2 - p.J) * p.sigma_T * p.sigma_T));
}

NoiseSnr theory_snr_noise(const TheoryParams& p, TheoryFamily family) {
    check_theory_common(p);
    if (!(p.sigma_A > 0.0))
        throw InvalidArgument("theory_snr_noise: sigma_A must be positive");
    const double n2 = static_cast<double>(p.n) * p.n;
    const double sA2 = p.sigma_A * p.sigma_A;

    NoiseSnr out;
    if (family == TheoryFamily::Random) {
        out.rmse_0 = std::sqrt(n2 * (p.mu_T * p.mu_T + p.sigma_T * p.sigma_T) / p.J);
    } else {
        out.rmse_0 = p.J >= n2 ? 0.0
                               : std::sqrt((n2 - p.J) * p.sigma_T * p.sigma_T / n2);
    }
    if (p.sigma_p > 0.0 || p.sigma_m > 0.0) {
        if (!(p.P > 0.0))
            throw InvalidArgument("theory_snr_noise: P must be positive when noise "
                                  "terms are requested");
    }
    if (p.sigma_p > 0.0)
        out.rmse_p = std::sqrt(p.sigma_p * p.sigma_p * p.mu_A * p.mu_T * n2 / (p.P * sA2));
    if (p.sigma_m > 0.0)
        out.rmse_m = std::sqrt(p.J * p.sigma_m * p.sigma_m / (p.P * p.P * sA2));

    const double total_sq = out.rmse_0 * out.rmse_0 + out.rmse_p * out.rmse_p +
                            out.rmse_m * out.rmse_m;
    out.snr = total_sq > 0.0 ? 1.0 / std::sqrt(total_sq)
                             : std::numeric_limits<double>::infinity();
    return out;
}

double j_opt(const TheoryParams& p) {
    if (p.n < 2) throw InvalidArgument("j_opt: n must be at least 2");
    if (!(p.sigma_m > 0.0)) throw InvalidArgument("j_opt: sigma_m must be positive");
    if (!(p.sigma_A > 0.0)) throw InvalidArgument("j_opt: sigma_A must be positive");
    if (!(p.P > 0.0)) throw InvalidArgument("j_opt: P must be positive");
    return p.P * p.n * p.sigma_A *
           std::sqrt(p.mu_T * p.mu_T + p.sigma_T * p.sigma_T) / p.sigma_m;
}

ComparisonRatios comparison_ratios(const TheoryParams& p) {
    check_theory_common(p);
    if (!(p.sigma_A > 0.0))
        throw InvalidArgument("comparison_ratios: sigma_A must be positive");
    const double n2 = static_cast<double>(p.n) * p.n;
    const double sA2 = p.sigma_A * p.sigma_A;
    ComparisonRatios out;
    out.sp_gauss = std::sqrt(static_cast<double>(p.J) / (n2 * n2 * sA2));
    out.di_gauss = std::sqrt(static_cast<double>(p.J) * p.mu_A * p.mu_A / sA2);
    out.sp_poisson = std::sqrt(p.mu_A / sA2);
    out.di_poisson = std::sqrt(n2 * p.mu_A * p.mu_A / sA2);
    return out;
}

// ------------------------------------------------------------------ objects

Image make_uniform_object(int n, double mu_T, double sigma_T, const Seed& seed) {
    if (n < 2) throw InvalidArgument("make_uniform_object: n must be at least 2");
    const double sqrt3 = 1.7320508075688772;
    const double bound = std::min(mu_T, 1.0 - mu_T) / sqrt3;
    if (!(mu_T >= 0.0 && mu_T <= 1.0) || !(sigma_T >= 0.0) ||
        sigma_T > bound * (1.0 + 1e-12))
        throw InvalidArgument("make_uniform_object: the uniform support must fit in "
                              "[0,1]: need 0 <= mu_T <= 1 and "
                              "sigma_T <= min(mu_T, 1-mu_T)/sqrt(3)");
    Image out = Image::square(n);
    Rng rng(seed);
    const double half_width = sqrt3 * sigma_T;
    for (double& v : out.data())
        v = sigma_T == 0.0 ? mu_T : mu_T + (2.0 * rng.uniform() - 1.0) * half_width;
    return out;
}

Image make_two_level_stencil(int n, double frac_hi, double lo, double hi) {
    if (n < 2) throw InvalidArgument("make_two_level_stencil: n must be at least 2");
    if (!(frac_hi > 0.0 && frac_hi < 1.0))
        throw InvalidArgument("make_two_level_stencil: frac_hi must be in (0,1)");
    if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0))
        throw InvalidArgument("make_two_level_stencil: levels must be in [0,1]");

    // Rank pixels by their coverage of thick-stroke glyphs and set exactly
    // round(frac_hi * n^2) of them to `hi`, so the object's two-level
    // statistics are exact by construction.
    const double scene = 1.0;
    const double letter_h = 0.5 * scene;
    const double stroke_w = 0.2 * letter_h;
    const std::vector<detail::Segment> skel = detail::xgi_skeleton(scene, letter_h);
    const double pitch = scene / n;

    std::vector<double> coverage(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double x = (c + 0.5) * pitch;
            const double y = (r + 0.5) * pitch;
            const double d = detail::skeleton_distance(skel, x, y);
            coverage[static_cast<size_t>(r) * n + c] =
                std::clamp(0.5 + (0.5 * stroke_w - d) / pitch, 0.0, 1.0);
        }

    std::vector<size_t> order(coverage.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (coverage[a] != coverage[b]) return coverage[a] > coverage[b];
        return a < b;
    });
    const size_t k = static_cast<size_t>(
        std::llround(frac_hi * static_cast<double>(coverage.size())));

    Image out = Image::square(n);
    for (double& v : out.data()) v = lo;
    for (size_t i = 0; i < k && i < order.size(); ++i) out.data()[order[i]] = hi;
    return out;
}

// ------------------------------------------------------------------- sweeps

const char* recon_method_name(ReconMethod m) {
    switch (m) {
        case ReconMethod::Xc: return "xc";
        case ReconMethod::ScaledXc: return "scaled_xc";
        case ReconMethod::Landweber: return "landweber";
        case ReconMethod::Pinv: return "pinv";
    }
    return "?";
}

const char* budget_mode_name(BudgetMode m) {
    switch (m) {
        case BudgetMode::ConstantT0: return "constant_t0";
        case BudgetMode::ConstantTau: return "constant_tau";
        case BudgetMode::NoiseFree: return "noise_free";
    }
    return "?";
}

namespace {

struct SweepPoint {
    int J;
    int n;
    double mu_A;
    double sigma_A;
    double mu_T;
    double sigma_T;
    double t0_s; // resolved per-exposure time
};

bool is_orthogonal_family(MaskFamily f) {
    return f == MaskFamily::Hadamard || f == MaskFamily::UraScan ||
           f == MaskFamily::PinholeScan;
}

MaskEnsemble build_ensemble(MaskFamily family, const SweepPoint& pt, double sigma_g_px,
                            const Seed& seed) {
    switch (family) {
        case MaskFamily::RandomBinary:
            return gen_random_binary(pt.n, pt.J, pt.mu_A, seed);
        case MaskFamily::RandomGray:
            return gen_random_gray(pt.n, pt.J, pt.mu_A, pt.sigma_A, seed);
        case MaskFamily::Blurred:
            return blur_masks(gen_random_binary(pt.n, pt.J, pt.mu_A, seed), sigma_g_px);
        case MaskFamily::Hadamard: {
            MaskEnsemble full = gen_hadamard(pt.n);
            return pt.J == full.J ? full
                   : pt.J < full.J ? take_prefix(full, pt.J)
                                   : tile_to(full, pt.J);
        }
        case MaskFamily::UraScan: {
            MaskEnsemble full = gen_ura_scan(pt.n);
            return pt.J == full.J ? full
                   : pt.J < full.J ? take_prefix(full, pt.J)
                                   : tile_to(full, pt.J);
        }
        case MaskFamily::PinholeScan: {
            MaskEnsemble full = gen_pinhole_scan(pt.n);
            return pt.J == full.J ? full
                   : pt.J < full.J ? take_prefix(full, pt.J)
                                   : tile_to(full, pt.J);
        }
    }
    throw InvalidArgument("run_sweep: unknown mask family");
}

} // namespace

std::vector<SnrRecord> run_sweep(const SweepConfig& config) {
    if (config.values.empty())
        throw InvalidArgument("run_sweep: the value grid must not be empty");
    if (config.families.empty())
        throw InvalidArgument("run_sweep: at least one mask family is required");
    if (config.noises.empty())
        throw InvalidArgument("run_sweep: at least one noise spec is required");
    if (config.seeds < 1)
        throw InvalidArgument("run_sweep: seed count must be at least 1");
    static const char* const known_params[] = {"J", "n", "mu_A", "sigma_A",
                                               "mu_T", "sigma_T", "P_over_J"};
    bool known = false;
    for (const char* p : known_params) known = known || config.varied_param == p;
    if (!known)
        throw InvalidArgument("run_sweep: unknown varied_param '" + config.varied_param +
                              "' (expected one of J, n, mu_A, sigma_A, mu_T, sigma_T, "
                              "P_over_J)");

    std::vector<SnrRecord> records;
    for (MaskFamily family : config.families) {
        const Seed family_seed = derive_seed(config.root_seed, mask_family_name(family));
        for (size_t vi = 0; vi < config.values.size(); ++vi) {
            const double value = config.values[vi];

            SweepPoint pt{config.J, config.n, config.mu_A, config.sigma_A,
                          config.mu_T, config.sigma_T, config.t0_s};
            if (config.varied_param == "J") pt.J = static_cast<int>(std::llround(value));
            else if (config.varied_param == "n") pt.n = static_cast<int>(std::llround(value));
            else if (config.varied_param == "mu_A") pt.mu_A = value;
            else if (config.varied_param == "sigma_A") pt.sigma_A = value;
            else if (config.varied_param == "mu_T") pt.mu_T = value;
            else if (config.varied_param == "sigma_T") pt.sigma_T = value;

            const double pitch = config.pitch_mm > 0.0 ? config.pitch_mm : 1.0 / pt.n;
            if (config.budget_mode == BudgetMode::ConstantTau)
                pt.t0_s = config.tau_s / pt.J;
            if (config.varied_param == "P_over_J")
                pt.t0_s = value / (config.flux_B * pitch * pitch);

            const Seed value_seed = derive_seed(family_seed, "v" + std::to_string(vi));
            for (size_t ni = 0; ni < config.noises.size(); ++ni) {
                const NoiseSpec& noise = config.noises[ni];
                const Seed noise_seed = derive_seed(value_seed, "noise" + std::to_string(ni));
                for (int s = 0; s < config.seeds; ++s) {
                    const Seed run_seed = derive_seed(noise_seed, "seed" + std::to_string(s));

                    const MaskEnsemble ens = build_ensemble(
                        family, pt, config.sigma_g_px, derive_seed(run_seed, "masks"));
                    Image T = config.object == ObjectKind::UniformRandom
                                  ? make_uniform_object(pt.n, pt.mu_T, pt.sigma_T,
                                                        derive_seed(run_seed, "object"))
                                  : make_two_level_stencil(pt.n);
                    T.set_pitch_mm(pitch);

                    PhotonBudget budget;
                    budget.flux_B = config.flux_B;
                    budget.t0_s = pt.t0_s;
                    budget.J = ens.J;
                    budget.pitch_mm = pitch;

                    const bool noise_active =
                        config.budget_mode != BudgetMode::NoiseFree &&
                        noise.kind != NoiseKind::None;

                    BucketVector b = expected_buckets(T, ens, budget);
                    if (noise_active)
                        b = apply_noise(b, noise, derive_seed(run_seed, "noise"));

                    Image recon = Image::square(pt.n);
                    switch (config.recon) {
                        case ReconMethod::Xc: recon = xc(ens, b); break;
                        case ReconMethod::ScaledXc: recon = scaled_xc(ens, b); break;
                        case ReconMethod::Landweber:
                            recon = landweber(ens, b, config.landweber_alpha,
                                              config.landweber_iterations);
                            break;
                        case ReconMethod::Pinv: recon = pinv_recon(ens, b); break;
                    }
                    const RmseSnr measured = rmse_snr(recon, T);

                    const ImageStats t_stats = image_stats(T);
                    TheoryParams tp;
                    tp.J = ens.J;
                    tp.n = ens.n;
                    tp.mu_A = ens.mu_A;
                    tp.sigma_A = ens.sigma_A;
                    tp.mu_T = t_stats.mu;
                    tp.sigma_T = t_stats.sigma;
                    tp.P = budget.total_photons();
                    tp.sigma_p = noise_active && (noise.kind == NoiseKind::Poisson ||
                                                  noise.kind == NoiseKind::Both)
                                     ? noise.sigma_p
                                     : 0.0;
                    tp.sigma_m = noise_active && (noise.kind == NoiseKind::Gaussian ||
                                                  noise.kind == NoiseKind::Both)
                                     ? noise.sigma_m
                                     : 0.0;
                    const TheoryFamily tf = is_orthogonal_family(family)
                                                ? TheoryFamily::Orthogonal
                                                : TheoryFamily::Random;
                    const NoiseSnr theory = theory_snr_noise(tp, tf);

                    SnrRecord rec;
                    rec.sweep_name = config.sweep_name;
                    rec.varied_param = config.varied_param;
                    rec.value = value;
                    rec.family = mask_family_name(family);
                    rec.recon = recon_method_name(config.recon);
                    rec.noise = noise_active ? noise_kind_name(noise.kind)
                                             : noise_kind_name(NoiseKind::None);
                    rec.seed = run_seed.value;
                    rec.snr_sim = measured.snr;
                    rec.snr_theory = theory.snr;
                    rec.rmse0 = theory.rmse_0;
                    rec.rmsep = theory.rmse_p;
                    rec.rmsem = theory.rmse_m;
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    return records;
}

} // namespace ghostsim
