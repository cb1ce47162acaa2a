// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/ccd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ensemble_util.hpp"
#include "fft.hpp"
#include "ghostsim/parallel.hpp"
#include "ghostsim/random.hpp"
#include "ghostsim/recon.hpp"
#include "glyphs.hpp"

namespace ghostsim {

void CcdConfig::validate() const {
    if (rows < 2 || cols < 2) throw InvalidArgument("CcdConfig: sensor must be at least 2x2");
    if (binning < 1) throw InvalidArgument("CcdConfig: binning must be at least 1");
    if (rows % binning != 0 || cols % binning != 0)
        throw InvalidArgument("CcdConfig: rows and cols must be divisible by the binning");
    if (rows / binning < 2 || cols / binning < 2)
        throw InvalidArgument("CcdConfig: binned frame must be at least 2x2");
    if (!(readout_s >= 0.0) || !std::isfinite(readout_s))
        throw InvalidArgument("CcdConfig: readout_s must be non-negative and finite");
}

namespace {

constexpr double kSpeckleSigmaMm = 0.117; ///< Gaussian blur width of the diffuser
constexpr double kSpeckleLo = 0.5;        ///< rescaled mask range
constexpr double kSpeckleHi = 1.0;
// Half-range of the affine rescale in units of the blurred field's std.  At
// 3.35 sigma about 0.07% of samples clip, and the surviving std gives the
// canonical speckle contrast g2(0) - 1 = (0.25/3.35)^2 / 0.75^2 ~ 0.0099.
constexpr double kSpeckleRescaleSigmas = 3.35;

constexpr double kSceneMm = 5.0;      ///< stencil / speckle field of view
constexpr double kLetterHeightMm = 2.5;
constexpr double kStrokeWidthMm = 0.13;
constexpr double kSceneRateHz = 120.0; ///< photons/s per fully open native pixel

/// Streaming generator of the sandpaper speckle masks: binary half-coverage
/// patterns blurred with a fixed Gaussian, affinely rescaled to [0.5, 1.0]
/// using ensemble statistics gathered in a calibration pass.  Masks are
/// regenerated on demand so an ensemble never has to be held in memory.
class SpeckleStream {
public:
    SpeckleStream(int J, int n, double fov_mm, const Seed& seed)
        : J_(J), n_(n), seed_(seed), fft_(n, n) {
        if (J < 1) throw InvalidArgument("gen_sandpaper_speckle: J must be at least 1");
        if (n < 2) throw InvalidArgument("gen_sandpaper_speckle: n must be at least 2");
        if (!(fov_mm > 0.0)) throw InvalidArgument("gen_sandpaper_speckle: fov must be positive");
        pitch_mm_ = fov_mm / n;
        const double sigma_px = kSpeckleSigmaMm / pitch_mm_;

        // Wrapped separable Gaussian kernel, truncated at 6 sigma.
        const int radius = static_cast<int>(std::floor(6.0 * sigma_px));
        std::vector<double> taps(2 * radius + 1);
        double norm = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            const double w = std::exp(-0.5 * (i / sigma_px) * (i / sigma_px));
            taps[i + radius] = w;
            norm += w;
        }
        for (double& w : taps) w /= norm;
        std::vector<double> kernel(static_cast<size_t>(n) * n, 0.0);
        for (int dr = -radius; dr <= radius; ++dr)
            for (int dc = -radius; dc <= radius; ++dc) {
                const int r = ((dr % n) + n) % n;
                const int c = ((dc % n) + n) % n;
                kernel[static_cast<size_t>(r) * n + c] += taps[dr + radius] * taps[dc + radius];
            }
        fft_.forward(kernel.data());
        kernel_spec_.assign(fft_.spectrum(), fft_.spectrum() + fft_.spectrum_size());

        // Calibration pass: mean and std of the blurred field fix the affine
        // rescale.  A 512-mask prefix is enough — even counting correlation
        // within a field it holds > 10^4 independent samples, pinning the
        // std to < 1%, far inside the g2-contrast tolerance — and it keeps
        // the stream one-pass for the large ensembles of the experiment
        // replications (masks j >= 512 are generated exactly once).
        const int calib = std::min(J_, 512);
        double sum = 0.0, sum_sq = 0.0;
        std::vector<double> buf(static_cast<size_t>(n) * n);
        for (int j = 0; j < calib; ++j) {
            blurred_raw(j, buf);
            for (double v : buf) {
                sum += v;
                sum_sq += v * v;
            }
        }
        const double count = static_cast<double>(calib) * n_ * n_;
        mu_raw_ = sum / count;
        const double var = std::max(0.0, sum_sq / count - mu_raw_ * mu_raw_);
        if (!(var > 0.0))
            throw NumericError("gen_sandpaper_speckle: degenerate blurred field");
        scale_ = (0.5 * (kSpeckleHi - kSpeckleLo)) /
                 (kSpeckleRescaleSigmas * std::sqrt(var));
    }

    int J() const { return J_; }
    int n() const { return n_; }
    double pitch_mm() const { return pitch_mm_; }

    /// Final mask j: blurred binary pattern, rescaled and clamped.
    Image materialize(int j) {
        Image out = Image::square(n_, pitch_mm_);
        blurred_raw(j, out.data());
        const double mid = 0.5 * (kSpeckleLo + kSpeckleHi);
        for (double& v : out.data())
            v = std::clamp(mid + (v - mu_raw_) * scale_, kSpeckleLo, kSpeckleHi);
        return out;
    }

private:
    void blurred_raw(int j, std::vector<double>& buf) {
        buf.resize(static_cast<size_t>(n_) * n_);
        Rng rng(derive_seed(seed_, static_cast<uint64_t>(j)));
        for (double& v : buf) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
        fft_.forward(buf.data());
        std::complex<double>* spec = fft_.spectrum();
        for (int i = 0; i < fft_.spectrum_size(); ++i) spec[i] *= kernel_spec_[i];
        fft_.inverse(buf.data());
    }

    int J_;
    int n_;
    Seed seed_;
    double pitch_mm_ = 0.0;
    detail::FftWorkspace fft_;
    std::vector<std::complex<double>> kernel_spec_;
    double mu_raw_ = 0.0;
    double scale_ = 1.0;
};

/// Non-periodic Gaussian blur used for the PSF-matched reference stencil.
Image gaussian_blur_image(const Image& img, double sigma_px) {
    const int n = img.n();
    const int radius = std::max(1, static_cast<int>(std::floor(6.0 * sigma_px)));
    std::vector<double> taps(2 * radius + 1);
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i / sigma_px) * (i / sigma_px));
        taps[i + radius] = w;
        norm += w;
    }
    for (double& w : taps) w /= norm;

    Image tmp(n, n, img.pitch_mm());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int cc = std::clamp(c + i, 0, n - 1);
                acc += taps[i + radius] * img.at(r, cc);
            }
            tmp.at(r, c) = acc;
        }
    Image out(n, n, img.pitch_mm());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int rr = std::clamp(r + i, 0, n - 1);
                acc += taps[i + radius] * tmp.at(rr, c);
            }
            out.at(r, c) = acc;
        }
    return out;
}

/// Block-mean binning of a square image (for mask/object downsampling).
Image bin_mean(const Image& img, int binning) {
    const int n = img.n();
    const int nb = n / binning;
    Image out(nb, nb, img.pitch_mm() * binning);
    const double inv = 1.0 / (static_cast<double>(binning) * binning);
    for (int r = 0; r < nb; ++r)
        for (int c = 0; c < nb; ++c) {
            double acc = 0.0;
            for (int dr = 0; dr < binning; ++dr)
                for (int dc = 0; dc < binning; ++dc)
                    acc += img.at(r * binning + dr, c * binning + dc);
            out.at(r, c) = acc * inv;
        }
    return out;
}

double pearson(const Image& a, const Image& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("pearson: image shapes differ");
    const size_t count = a.size();
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < count; ++i) {
        ma += a.data()[i];
        mb += b.data()[i];
    }
    ma /= static_cast<double>(count);
    mb /= static_cast<double>(count);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double da = a.data()[i] - ma;
        const double db = b.data()[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0))
        throw NumericError("pearson: constant image has no correlation");
    return sab / std::sqrt(saa * sbb);
}

} // namespace

MaskEnsemble gen_sandpaper_speckle(int J, int n, double fov_mm, const Seed& seed) {
    SpeckleStream stream(J, n, fov_mm, seed);
    MaskEnsemble ens;
    ens.family = MaskFamily::Blurred;
    ens.masks.reserve(J);
    for (int j = 0; j < J; ++j) ens.masks.push_back(stream.materialize(j));
    refresh_stats(ens);
    return ens;
}

G2Profile g2_profile(const MaskEnsemble& ens) {
    if (ens.J < 100)
        throw InvalidArgument("g2_profile: at least 100 masks are required, got " +
                              std::to_string(ens.J));
    const int n = ens.n;
    const size_t px = static_cast<size_t>(n) * n;

    // Numerator <A(p)A(p+d)>_{j,p} via an accumulated power spectrum;
    // denominator <m(p)m(p+d)>_p from the mean map.
    detail::FftWorkspace fft(n, n);
    std::vector<double> power(fft.spectrum_size(), 0.0);
    for (const Image& m : ens.masks) {
        fft.forward(m.data().data());
        const std::complex<double>* spec = fft.spectrum();
        for (int i = 0; i < fft.spectrum_size(); ++i) power[i] += std::norm(spec[i]);
    }
    std::complex<double>* spec = fft.spectrum();
    for (int i = 0; i < fft.spectrum_size(); ++i) spec[i] = power[i];
    std::vector<double> num(px);
    fft.inverse(num.data());
    for (double& v : num) v /= static_cast<double>(ens.J) * px;

    const std::vector<double> mean = detail::ensemble_mean_map(ens);
    fft.forward(mean.data());
    std::complex<double>* mspec = fft.spectrum();
    for (int i = 0; i < fft.spectrum_size(); ++i) mspec[i] = std::norm(mspec[i]);
    std::vector<double> den(px);
    fft.inverse(den.data());
    for (double& v : den) v /= static_cast<double>(px);

    // Radial average over wrapped displacements.
    const int n_bins = n / 2 + 1;
    std::vector<double> sum(n_bins, 0.0);
    std::vector<int> count(n_bins, 0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const int dr = r <= n / 2 ? r : r - n;
            const int dc = c <= n / 2 ? c : c - n;
            const int bin = static_cast<int>(
                std::floor(std::sqrt(static_cast<double>(dr) * dr +
                                     static_cast<double>(dc) * dc) + 0.5));
            if (bin >= n_bins) continue;
            const size_t idx = static_cast<size_t>(r) * n + c;
            if (!(den[idx] > 0.0))
                throw NumericError("g2_profile: zero-mean displacement; ensemble too sparse");
            sum[bin] += num[idx] / den[idx];
            count[bin] += 1;
        }

    G2Profile out;
    const double pitch = ens.masks.front().pitch_mm();
    for (int k = 0; k < n_bins; ++k) {
        if (count[k] == 0) continue;
        out.radius_mm.push_back(k * pitch);
        out.value.push_back(sum[k] / count[k]);
    }
    out.max = out.value.front();

    const double peak = out.max - 1.0;
    if (!(peak > 0.0))
        throw NumericError("g2_profile: degenerate (constant) ensemble");
    const double target = 0.5 * peak;
    out.fwhm_mm = 0.0;
    for (size_t k = 1; k < out.value.size(); ++k) {
        const double prev = out.value[k - 1] - 1.0;
        const double cur = out.value[k] - 1.0;
        if (cur < target) {
            const double frac = (prev - target) / (prev - cur);
            const double r_half = (static_cast<double>(k - 1) + frac) * pitch;
            out.fwhm_mm = 2.0 * r_half;
            break;
        }
    }
    if (out.fwhm_mm == 0.0)
        throw NumericError("g2_profile: correlation does not decay to half maximum");
    return out;
}

Image make_stencil(int n, double rotation_deg) {
    if (n < 64)
        throw InvalidArgument("make_stencil: n must be at least 64, got " + std::to_string(n));
    const double pitch = kSceneMm / 250.0; // fixed 20 um pitch; scene scales with n
    const double scene_mm = pitch * n;
    const std::vector<detail::Segment> skel = detail::xgi_skeleton(scene_mm, kLetterHeightMm);

    Image base = Image::square(n, pitch);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double x = (c + 0.5) * pitch;
            const double y = (r + 0.5) * pitch;
            base.at(r, c) =
                detail::skeleton_distance(skel, x, y) <= 0.5 * kStrokeWidthMm ? 1.0 : 0.0;
        }
    if (rotation_deg == 0.0) return base;

    // Bilinear resampling about the scene center; values clamped to [0,1].
    const double theta = rotation_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double center = 0.5 * (n - 1);
    Image out = Image::square(n, pitch);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            // Source position: rotate backwards about the center.
            const double xr = c - center;
            const double yr = r - center;
            const double xs = ct * xr + st * yr + center;
            const double ys = -st * xr + ct * yr + center;
            const int c0 = static_cast<int>(std::floor(xs));
            const int r0 = static_cast<int>(std::floor(ys));
            const double fx = xs - c0;
            const double fy = ys - r0;
            double acc = 0.0;
            for (int dr = 0; dr <= 1; ++dr)
                for (int dc = 0; dc <= 1; ++dc) {
                    const int rr = r0 + dr;
                    const int cc = c0 + dc;
                    if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
                    const double w = (dr ? fy : 1.0 - fy) * (dc ? fx : 1.0 - fx);
                    acc += w * base.at(rr, cc);
                }
            out.at(r, c) = std::clamp(acc, 0.0, 1.0);
        }
    return out;
}

Image readout_smear(const Image& rate, double t0_s, const CcdConfig& ccd) {
    ccd.validate();
    if (!(t0_s >= 0.0) || !std::isfinite(t0_s))
        throw InvalidArgument("readout_smear: t0_s must be non-negative and finite");
    const int R = ccd.binned_rows();
    const int C = ccd.binned_cols();
    if (rate.rows() != R || rate.cols() != C)
        throw DimensionMismatch("readout_smear: rate grid is " + std::to_string(rate.rows()) +
                                "x" + std::to_string(rate.cols()) + ", binned sensor is " +
                                std::to_string(R) + "x" + std::to_string(C));
    for (double v : rate.data())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidArgument("readout_smear: rates must be non-negative and finite");

    const double dwell = ccd.readout_s / R;
    Image out(R, C, rate.pitch_mm());
    for (int c = 0; c < C; ++c) {
        // Row 0 is read first; a packet at row r passes rows k < r on its
        // way out and integrates `dwell` seconds under each.
        double below = 0.0;
        for (int r = 0; r < R; ++r) {
            out.at(r, c) = t0_s * rate.at(r, c) + dwell * below;
            below += rate.at(r, c);
        }
        if (!ccd.cleared_before_exposure) {
            // Continuous acquisition: charge also accumulated while passing
            // the rows above during the previous shift cycle.
            double above = 0.0;
            for (int r = R - 1; r >= 0; --r) {
                out.at(r, c) += dwell * above;
                above += rate.at(r, c);
            }
        }
    }
    return out;
}

Image zhang_frame(const Image& T, const Image& mask, double t0_s, const CcdConfig& ccd,
                  bool shutter, const Seed& seed) {
    ccd.validate();
    if (!(t0_s > 0.0) || !std::isfinite(t0_s))
        throw InvalidArgument("zhang_frame: t0_s must be positive and finite");
    const int n = T.n();
    if (mask.rows() != n || mask.cols() != n)
        throw DimensionMismatch("zhang_frame: stencil and mask grids differ");
    if (ccd.cols != n)
        throw DimensionMismatch("zhang_frame: sensor columns must match the scene width");
    if (n % ccd.binning != 0)
        throw InvalidArgument("zhang_frame: scene side must be divisible by the binning");
    const int R = ccd.binned_rows();
    const int C = ccd.binned_cols();
    const int scene_rows = n / ccd.binning;
    if (scene_rows > R)
        throw DimensionMismatch("zhang_frame: scene does not fit on the sensor");

    // Expected photon rate on the binned grid; the scene occupies the
    // first-read rows, the rest of the sensor is dark.
    Image rate(R, C, T.pitch_mm() * ccd.binning);
    for (int r = 0; r < scene_rows; ++r)
        for (int c = 0; c < C; ++c) {
            double acc = 0.0;
            for (int dr = 0; dr < ccd.binning; ++dr)
                for (int dc = 0; dc < ccd.binning; ++dc) {
                    const int rr = r * ccd.binning + dr;
                    const int cc = c * ccd.binning + dc;
                    acc += T.at(rr, cc) * mask.at(rr, cc);
                }
            rate.at(r, c) = kSceneRateHz * acc;
        }

    Image expected = shutter ? Image(R, C, rate.pitch_mm())
                             : readout_smear(rate, t0_s, ccd);
    if (shutter)
        for (size_t i = 0; i < expected.size(); ++i)
            expected.data()[i] = t0_s * rate.data()[i];

    // Shot noise on the expected counts plus dark counts accrued over the
    // exposure and the read-out, per binned pixel.
    const double dark_lambda = 100.0 * (t0_s + ccd.readout_s);
    Image frame(R, C, rate.pitch_mm());
    parallel_for(R, 16, [&](int64_t begin, int64_t end) {
        for (int64_t r = begin; r < end; ++r) {
            Rng rng(derive_seed(seed, static_cast<uint64_t>(r)));
            for (int c = 0; c < C; ++c)
                frame.at(static_cast<int>(r), c) =
                    rng.poisson(expected.at(static_cast<int>(r), c)) +
                    0.01 * rng.poisson(dark_lambda);
        }
    });
    return frame;
}

double frame_to_bucket(const Image& frame, SmearMitigation mitigation,
                       const BucketRegion& region) {
    const int R = frame.rows();
    const int C = frame.cols();
    int row_begin = region.row_begin;
    int row_end = region.row_end > 0 ? region.row_end : R;
    if (mitigation == SmearMitigation::None) {
        row_begin = 0;
        row_end = R;
    }
    if (row_begin < 0 || row_end > R || row_begin >= row_end)
        throw InvalidArgument("frame_to_bucket: invalid row range [" +
                              std::to_string(row_begin) + ", " + std::to_string(row_end) + ")");

    std::vector<double> column_offset(C, 0.0);
    if (mitigation == SmearMitigation::DarkfieldSubtract) {
        const int d0 = region.dark_row_begin;
        const int d1 = region.dark_row_end;
        if (d0 < 0 || d1 > R || d0 >= d1)
            throw InvalidArgument("frame_to_bucket: invalid dark-field rows [" +
                                  std::to_string(d0) + ", " + std::to_string(d1) + ")");
        for (int c = 0; c < C; ++c) {
            double acc = 0.0;
            for (int r = d0; r < d1; ++r) acc += frame.at(r, c);
            column_offset[c] = acc / (d1 - d0);
        }
    }

    double bucket = 0.0;
    for (int r = row_begin; r < row_end; ++r)
        for (int c = 0; c < C; ++c) bucket += frame.at(r, c) - column_offset[c];
    return bucket;
}

namespace {

struct ZhangPreset {
    double t0_s;
    CcdConfig ccd;
    bool direct;
};

ZhangPreset zhang_preset(ZhangExperiment experiment) {
    switch (experiment) {
        case ZhangExperiment::I:
            return {0.150, CcdConfig{1304, 256, 0.12, 8, true, 0.0}, false};
        case ZhangExperiment::II:
            return {1e-6, CcdConfig{1304, 256, 0.12, 8, true, 0.0}, false};
        case ZhangExperiment::III:
            return {0.010, CcdConfig{1300, 256, 0.93, 1, true, 60.0}, true};
    }
    throw InvalidArgument("run_zhang: unknown experiment");
}

} // namespace

ZhangResult run_zhang(ZhangExperiment experiment, bool shutter, const Seed& seed, int J) {
    if (J < 100) throw InvalidArgument("run_zhang: J must be at least 100");
    const ZhangPreset preset = zhang_preset(experiment);
    const int n = 256;

    ZhangResult out;
    out.experiment = experiment;
    out.shutter = shutter;
    out.ccd = preset.ccd;
    out.t0_s = preset.t0_s;

    const double fov_mm = kSceneMm * n / 250.0; // 20 um pitch, same grid as the stencil
    SpeckleStream speckle(preset.direct ? 1 : J, n, fov_mm, derive_seed(seed, "speckle"));
    const Image stencil = make_stencil(n, preset.ccd.rotation_deg);

    if (preset.direct) {
        // Single direct exposure through the first speckle mask.
        const Image mask = speckle.materialize(0);
        out.sample_frame = zhang_frame(stencil, mask, preset.t0_s, preset.ccd, shutter,
                                       derive_seed(seed, "direct"));
        out.recon = out.sample_frame;

        // Reference: the expected (noise-free) frame of the same acquisition.
        const int R = preset.ccd.binned_rows();
        Image rate(R, n, stencil.pitch_mm());
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                rate.at(r, c) = kSceneRateHz * stencil.at(r, c) * mask.at(r, c);
        Image expected = readout_smear(rate, preset.t0_s, preset.ccd);
        if (shutter)
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < n; ++c)
                    expected.at(r, c) = preset.t0_s * rate.at(r, c);
        const double dark_mean = 0.01 * 100.0 * (preset.t0_s + preset.ccd.readout_s);
        for (double& v : expected.data()) v += dark_mean;
        out.reference = expected;
        out.r = pearson(out.recon, out.reference);
        out.r_control = 0.0;
        out.buckets.J = 1;
        out.buckets.values = {frame_to_bucket(out.sample_frame, SmearMitigation::None)};
        out.buckets.exposure_s = preset.t0_s;
        out.buckets.photon_scale = kSceneRateHz * preset.t0_s;
        return out;
    }

    // Ghost imaging: one bucket per speckle mask, reconstruction on the
    // binned grid with the binned masks.
    const int bin = preset.ccd.binning;
    MaskEnsemble binned;
    binned.family = MaskFamily::Blurred;
    binned.masks.reserve(J);

    BucketVector buckets;
    buckets.J = J;
    buckets.values.assign(J, 0.0);
    buckets.exposure_s = preset.t0_s;
    buckets.noise = NoiseSpec{NoiseKind::Poisson, 1.0, 0.0};

    const Seed frame_root = derive_seed(seed, "frames");
    for (int j = 0; j < J; ++j) {
        const Image mask = speckle.materialize(j);
        const Image frame = zhang_frame(stencil, mask, preset.t0_s, preset.ccd, shutter,
                                        derive_seed(frame_root, static_cast<uint64_t>(j)));
        buckets.values[j] = frame_to_bucket(frame, SmearMitigation::None);
        binned.masks.push_back(bin_mean(mask, bin));
        if (j == 0) out.sample_frame = frame;
    }
    refresh_stats(binned);

    // Photon scale: photons per unit of sum_b T_b A_b on the binned grid.
    // Without the shutter every scene row keeps collecting during read-out,
    // which raises the effective exposure by the mean remaining shift time.
    const int scene_rows = n / bin;
    const int R = preset.ccd.binned_rows();
    double t_eff = preset.t0_s;
    if (!shutter) {
        const double mean_scene_row = 0.5 * (scene_rows - 1);
        t_eff += preset.ccd.readout_s * (R - 1 - mean_scene_row) / R;
    }
    buckets.photon_scale = kSceneRateHz * t_eff * bin * bin;

    out.buckets = buckets;
    out.recon = scaled_xc(binned, buckets);

    // Reference: stencil blurred to the speckle correlation width (0.4 mm
    // FWHM Gaussian), then binned to the reconstruction grid.
    const double ref_sigma_px = (0.4 / 2.3548200450309493) / stencil.pitch_mm();
    out.reference = bin_mean(gaussian_blur_image(stencil, ref_sigma_px), bin);
    out.r = pearson(out.recon, out.reference);

    // Control: identical acquisitions with the source blocked (dark frames
    // only); their reconstructions must not correlate with the reference.
    // The bucket only needs the frame total, and a sum of independent
    // Poisson counts is Poisson of the summed mean, so one draw per frame
    // suffices.  Controls cost no acquisition, so r_control averages eight
    // independent repetitions to pin the zero-signal baseline tightly.
    const int control_reps = 8;
    BucketVector control = buckets;
    Rng control_rng(derive_seed(seed, "control"));
    const double dark_lambda = 100.0 * (preset.t0_s + preset.ccd.readout_s);
    const double px = static_cast<double>(R) * preset.ccd.binned_cols();
    double r_control_sum = 0.0;
    for (int rep = 0; rep < control_reps; ++rep) {
        for (int j = 0; j < J; ++j)
            control.values[j] = 0.01 * control_rng.poisson(px * dark_lambda);
        r_control_sum += pearson(scaled_xc(binned, control), out.reference);
    }
    out.r_control = r_control_sum / control_reps;
    return out;
}

} // namespace ghostsim
