// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ensemble_util.hpp"
#include "ghostsim/parallel.hpp"

namespace ghostsim {

using detail::accumulate_weighted_masks;
using detail::ensemble_mean_map;

namespace {

void check_pair(const MaskEnsemble& ens, const BucketVector& b) {
    if (ens.masks.empty()) throw InvalidArgument("reconstruction: empty ensemble");
    if (b.J != ens.J || static_cast<int>(b.values.size()) != ens.J)
        throw DimensionMismatch("reconstruction: bucket count " + std::to_string(b.J) +
                                " does not match ensemble J=" + std::to_string(ens.J));
    if (!(b.photon_scale > 0.0) || !std::isfinite(b.photon_scale))
        throw InvalidArgument("reconstruction: photon_scale must be positive and finite");
}

double bucket_mean(const BucketVector& b) {
    double s = 0.0;
    for (double v : b.values) s += v;
    return s / static_cast<double>(b.values.size());
}

/// Restore the lost object mean where the ensemble allows it: constant-sum
/// scans determine it from <b>; the full Hadamard set determines the single
/// annihilated pixel through its all-ones first mask.  Other ensembles keep
/// the mean in the measured subspace and need no correction.
void restore_mean(const MaskEnsemble& ens, const BucketVector& b, Image& img) {
    const double mean_b = bucket_mean(b);
    if (ens.constant_sum && *ens.constant_sum > 0.0) {
        const double offset = mean_b / (*ens.constant_sum * b.photon_scale);
        for (double& v : img.data()) v += offset;
        return;
    }
    if (ens.family == MaskFamily::Hadamard && ens.J == ens.n * ens.n) {
        const std::vector<double> mean_map = ensemble_mean_map(ens);
        double dot = 0.0;
        for (size_t x = 0; x < mean_map.size(); ++x) dot += mean_map[x] * img.data()[x];
        img.data()[0] += (mean_b / b.photon_scale - dot) / mean_map[0];
    }
}

} // namespace

Image xc(const MaskEnsemble& ens, const BucketVector& buckets) {
    check_pair(ens, buckets);
    const double mean_b = bucket_mean(buckets);
    std::vector<double> w(buckets.values);
    for (double& v : w) v -= mean_b;
    Image out = Image::square(ens.n, ens.masks.front().pitch_mm());
    out.data() = accumulate_weighted_masks(ens, w);
    return out;
}

double compute_gamma(const MaskEnsemble& ens) {
    if (ens.masks.empty()) throw InvalidArgument("compute_gamma: empty ensemble");
    switch (ens.family) {
        case MaskFamily::Hadamard:
        case MaskFamily::UraScan: {
            // The raw Gram of these families is two-valued (one diagonal
            // value, one off-diagonal value), so the mean-corrected Gram of
            // ANY subset is exactly (n^2/4)(I - 11^T/J): the scale stays at
            // the full-family value n^2/4 no matter how few masks are kept.
            // Tiling the full family m times multiplies the scale by m,
            // which is J/4 again; hence max(J, n^2)/4 covers both regimes.
            const double full = static_cast<double>(ens.n) * ens.n;
            return std::max(static_cast<double>(ens.J), full) / 4.0;
        }
        case MaskFamily::PinholeScan: {
            // Same two-valued-Gram argument with unit scale; tiling the
            // complete scan m times scales the Gram by m = J/n^2.
            const double full = static_cast<double>(ens.n) * ens.n;
            return std::max(1.0, static_cast<double>(ens.J) / full);
        }
        default: {
            // Integral of the cross-correlation PSF, in closed form: the
            // periodic autocorrelation of a mask sums to its pixel sum
            // squared, so the PSF integral reduces to the variance of the
            // mask sums over the ensemble.
            double s_sum = 0.0;
            std::vector<double> sums(ens.masks.size());
            for (size_t j = 0; j < ens.masks.size(); ++j) {
                double s = 0.0;
                for (double v : ens.masks[j].data()) s += v;
                sums[j] = s;
                s_sum += s;
            }
            const double s_bar = s_sum / static_cast<double>(sums.size());
            double acc = 0.0;
            for (double s : sums) {
                const double d = s - s_bar;
                acc += d * d;
            }
            return acc / static_cast<double>(ens.masks.front().size());
        }
    }
}

Image scaled_xc(const MaskEnsemble& ens, const BucketVector& buckets) {
    check_pair(ens, buckets);
    const double gamma = compute_gamma(ens);
    if (!(gamma > 0.0))
        throw NumericError("scaled_xc: degenerate ensemble (PSF normalization is zero)");
    Image img = xc(ens, buckets);
    const double scale = 1.0 / (gamma * buckets.photon_scale);
    for (double& v : img.data()) v *= scale;
    restore_mean(ens, buckets, img);
    return img;
}

Image landweber(const MaskEnsemble& ens, const BucketVector& buckets, double alpha,
                int iterations, const std::optional<Image>& init) {
    check_pair(ens, buckets);
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidArgument("landweber: alpha must be in (0, 1], got " +
                              std::to_string(alpha));
    if (iterations < 1)
        throw InvalidArgument("landweber: iteration count must be at least 1");
    const double gamma = compute_gamma(ens);
    if (!(gamma > 0.0))
        throw NumericError("landweber: degenerate ensemble (PSF normalization is zero)");

    const size_t px = ens.masks.front().size();
    Image t = Image::square(ens.n, ens.masks.front().pitch_mm());
    if (init) {
        if (init->rows() != ens.n || init->cols() != ens.n)
            throw DimensionMismatch("landweber: init image does not match the mask grid");
        t.data() = init->data();
    }

    const double mean_b = bucket_mean(buckets);
    std::vector<double> b_tilde(buckets.values);
    for (double& v : b_tilde) v = (v - mean_b) / buckets.photon_scale;
    const std::vector<double> mean_map = ensemble_mean_map(ens);

    const double step = alpha / (2.0 * gamma);
    std::vector<double> residual(ens.J, 0.0);
    double prev_norm = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    for (int it = 0; it < iterations; ++it) {
        // residual_j = b~_j - sum_x (A_j(x) - m(x)) t(x)
        double mean_proj = 0.0;
        for (size_t x = 0; x < px; ++x) mean_proj += mean_map[x] * t.data()[x];
        parallel_for(ens.J, 256, [&](int64_t begin, int64_t end) {
            for (int64_t j = begin; j < end; ++j) {
                const std::vector<double>& a = ens.masks[j].data();
                double proj = 0.0;
                for (size_t x = 0; x < px; ++x) proj += a[x] * t.data()[x];
                residual[j] = b_tilde[j] - (proj - mean_proj);
            }
        });

        double norm_sq = 0.0;
        for (double r : residual) norm_sq += r * r;
        if (norm_sq > prev_norm) {
            if (++growth_streak >= 10)
                throw NumericError("landweber: residual grew for 10 consecutive "
                                   "iterations; the step size is too large for this "
                                   "ensemble");
        } else {
            growth_streak = 0;
        }
        prev_norm = norm_sq;

        const std::vector<double> update = accumulate_weighted_masks(ens, residual);
        double r_sum = 0.0;
        for (double r : residual) r_sum += r;
        for (size_t x = 0; x < px; ++x)
            t.data()[x] += step * (update[x] - mean_map[x] * r_sum);
    }

    restore_mean(ens, buckets, t);
    return t;
}

Image pinv_recon(const MaskEnsemble& ens, const BucketVector& buckets,
                 const PinvOptions& options) {
    check_pair(ens, buckets);
    const size_t px = ens.masks.front().size();
    if (static_cast<int>(px) > options.max_pixels)
        throw InvalidArgument("pinv_recon: grid has " + std::to_string(px) +
                              " pixels, above the dense-solver limit of " +
                              std::to_string(options.max_pixels));

    const std::vector<double> mean_map = ensemble_mean_map(ens);

    // Normal matrix of the mean-corrected system, accumulated in mask
    // blocks.  Only the lower triangle is filled; LDLT reads just that part.
    const Eigen::Index npx = static_cast<Eigen::Index>(px);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(npx, npx);
    const int block = 256;
    Eigen::MatrixXd rows;
    for (int j0 = 0; j0 < ens.J; j0 += block) {
        const int nb = std::min(block, ens.J - j0);
        rows.resize(nb, npx);
        for (int j = 0; j < nb; ++j) {
            const std::vector<double>& a = ens.masks[j0 + j].data();
            for (Eigen::Index x = 0; x < npx; ++x) rows(j, x) = a[x] - mean_map[x];
        }
        gram.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
    }

    const double ridge = options.ridge_scale * gram.trace() / static_cast<double>(px);
    gram.diagonal().array() += ridge;

    const Image corr = xc(ens, buckets);
    Eigen::VectorXd rhs(npx);
    for (Eigen::Index x = 0; x < npx; ++x) rhs(x) = corr.data()[x] / buckets.photon_scale;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("pinv_recon: factorization of the normal matrix failed");
    const Eigen::VectorXd sol = ldlt.solve(rhs);

    Image t = Image::square(ens.n, ens.masks.front().pitch_mm());
    for (Eigen::Index x = 0; x < npx; ++x) t.data()[x] = sol(x);
    restore_mean(ens, buckets, t);
    return t;
}

} // namespace ghostsim
