// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/masks.hpp"

#include <cmath>
#include <cstdio>

#include "fft.hpp"
#include "ghostsim/parallel.hpp"
#include "ghostsim/random.hpp"

namespace ghostsim {

const char* mask_family_name(MaskFamily family) {
    switch (family) {
        case MaskFamily::RandomBinary: return "random_binary";
        case MaskFamily::RandomGray: return "random_gray";
        case MaskFamily::Blurred: return "blurred";
        case MaskFamily::Hadamard: return "hadamard";
        case MaskFamily::UraScan: return "ura_scan";
        case MaskFamily::PinholeScan: return "pinhole_scan";
    }
    return "?";
}

namespace {

void check_ensemble_shape(int n, int J) {
    if (n < 2) throw InvalidArgument("ensemble: n must be at least 2, got " + std::to_string(n));
    if (J < 1) throw InvalidArgument("ensemble: J must be at least 1, got " + std::to_string(J));
}

void check_mask_range(const MaskEnsemble& ens) {
    for (const Image& m : ens.masks)
        for (double v : m.data())
            if (!(v >= 0.0 && v <= 1.0))
                throw NumericError("ensemble: mask value outside [0,1]: " + std::to_string(v));
}

} // namespace

EnsembleStats ensemble_stats(const MaskEnsemble& ens) {
    if (ens.masks.empty()) throw InvalidArgument("ensemble_stats: empty ensemble");
    const size_t px = ens.masks.front().size();
    double sum = 0.0;
    std::vector<double> mask_sums(ens.masks.size(), 0.0);
    for (size_t j = 0; j < ens.masks.size(); ++j) {
        double s = 0.0;
        for (double v : ens.masks[j].data()) s += v;
        mask_sums[j] = s;
        sum += s;
    }
    const double count = static_cast<double>(px) * static_cast<double>(ens.masks.size());
    const double mu = sum / count;
    double ss = 0.0;
    for (const Image& m : ens.masks)
        for (double v : m.data()) {
            const double d = v - mu;
            ss += d * d;
        }

    EnsembleStats out;
    out.mu_A = mu;
    out.sigma_A = std::sqrt(ss / count);

    const double k = mask_sums.front();
    bool constant = true;
    const double tol = 1e-9 * std::max(1.0, std::fabs(k));
    for (double s : mask_sums)
        if (std::fabs(s - k) > tol) {
            constant = false;
            break;
        }
    if (constant) out.constant_sum = k;
    return out;
}

void refresh_stats(MaskEnsemble& ens) {
    const EnsembleStats st = ensemble_stats(ens);
    ens.mu_A = st.mu_A;
    ens.sigma_A = st.sigma_A;
    ens.constant_sum = st.constant_sum;
    ens.J = static_cast<int>(ens.masks.size());
    ens.n = ens.masks.front().n();
}

MaskEnsemble take_prefix(const MaskEnsemble& ens, int J) {
    if (J < 1 || J > ens.J)
        throw InvalidArgument("take_prefix: J must be in [1, " + std::to_string(ens.J) +
                              "], got " + std::to_string(J));
    MaskEnsemble out;
    out.family = ens.family;
    out.masks.assign(ens.masks.begin(), ens.masks.begin() + J);
    refresh_stats(out);
    return out;
}

MaskEnsemble tile_to(const MaskEnsemble& ens, int J) {
    if (ens.masks.empty()) throw InvalidArgument("tile_to: empty ensemble");
    if (J < 1) throw InvalidArgument("tile_to: J must be at least 1");
    MaskEnsemble out;
    out.family = ens.family;
    out.masks.reserve(J);
    for (int j = 0; j < J; ++j) out.masks.push_back(ens.masks[j % ens.J]);
    refresh_stats(out);
    return out;
}

MaskEnsemble gen_random_binary(int n, int J, double mu_A, const Seed& seed) {
    check_ensemble_shape(n, J);
    if (!(mu_A >= 0.0 && mu_A <= 1.0))
        throw InvalidArgument("gen_random_binary: mu_A must be in [0,1], got " +
                              std::to_string(mu_A));
    MaskEnsemble ens;
    ens.family = MaskFamily::RandomBinary;
    ens.masks.assign(J, Image::square(n));
    parallel_for(J, 64, [&](int64_t begin, int64_t end) {
        for (int64_t j = begin; j < end; ++j) {
            Rng rng(derive_seed(seed, static_cast<uint64_t>(j)));
            for (double& v : ens.masks[j].data()) v = rng.uniform() < mu_A ? 1.0 : 0.0;
        }
    });
    refresh_stats(ens);
    return ens;
}

MaskEnsemble gen_random_gray(int n, int J, double mu_A, double sigma_A, const Seed& seed) {
    check_ensemble_shape(n, J);
    if (!(mu_A >= 0.0 && mu_A <= 1.0))
        throw InvalidArgument("gen_random_gray: mu_A must be in [0,1], got " +
                              std::to_string(mu_A));
    const double sqrt3 = 1.7320508075688772;
    const double bound = std::min(mu_A, 1.0 - mu_A) / sqrt3;
    if (!(sigma_A >= 0.0) || sigma_A > bound * (1.0 + 1e-12))
        throw InvalidArgument(
            "gen_random_gray: sigma_A must be in [0, min(mu_A, 1-mu_A)/sqrt(3)] so the "
            "uniform support fits in [0,1]; got sigma_A = " + std::to_string(sigma_A) +
            " with bound " + std::to_string(bound));
    const double half_width = sqrt3 * sigma_A;
    MaskEnsemble ens;
    ens.family = MaskFamily::RandomGray;
    ens.masks.assign(J, Image::square(n));
    parallel_for(J, 64, [&](int64_t begin, int64_t end) {
        for (int64_t j = begin; j < end; ++j) {
            Rng rng(derive_seed(seed, static_cast<uint64_t>(j)));
            for (double& v : ens.masks[j].data())
                v = sigma_A == 0.0 ? mu_A : mu_A + (2.0 * rng.uniform() - 1.0) * half_width;
        }
    });
    refresh_stats(ens);
    check_mask_range(ens);
    return ens;
}

MaskEnsemble blur_masks(const MaskEnsemble& ens, double sigma_g_px) {
    if (!(sigma_g_px >= 0.0) || !std::isfinite(sigma_g_px))
        throw InvalidArgument("blur_masks: sigma_g_px must be non-negative and finite");
    if (ens.masks.empty()) throw InvalidArgument("blur_masks: empty ensemble");

    MaskEnsemble out;
    out.family = MaskFamily::Blurred;
    out.masks = ens.masks;

    // Kernel truncated at 6 sigma; below 0.05 px the radius is zero and the
    // kernel is an exact delta, so masks pass through unchanged.
    const int radius = static_cast<int>(std::floor(6.0 * sigma_g_px));
    if (radius >= 1) {
        const int n = ens.masks.front().n();
        std::vector<double> taps(2 * radius + 1);
        double norm = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            const double w = std::exp(-0.5 * (i / sigma_g_px) * (i / sigma_g_px));
            taps[i + radius] = w;
            norm += w;
        }
        for (double& w : taps) w /= norm;

        // Periodic convolution via the FFT of the wrapped separable kernel.
        detail::FftWorkspace fft(n, n);
        std::vector<double> kernel(static_cast<size_t>(n) * n, 0.0);
        for (int dr = -radius; dr <= radius; ++dr)
            for (int dc = -radius; dc <= radius; ++dc) {
                const int r = ((dr % n) + n) % n;
                const int c = ((dc % n) + n) % n;
                kernel[static_cast<size_t>(r) * n + c] += taps[dr + radius] * taps[dc + radius];
            }
        fft.forward(kernel.data());
        std::vector<std::complex<double>> kspec(fft.spectrum(),
                                                fft.spectrum() + fft.spectrum_size());

        for (Image& m : out.masks) {
            fft.forward(m.data().data());
            std::complex<double>* spec = fft.spectrum();
            for (int i = 0; i < fft.spectrum_size(); ++i) spec[i] *= kspec[i];
            fft.inverse(m.data().data());
            // Convolving with a convex kernel cannot leave [0,1]; clip the
            // last-ulp rounding excursions so the range invariant is exact.
            for (double& v : m.data()) v = std::min(1.0, std::max(0.0, v));
        }
    }

    refresh_stats(out);
    return out;
}

MaskEnsemble gen_hadamard(int n) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw InvalidArgument("gen_hadamard: n must be a power of two >= 2, got " +
                              std::to_string(n));
    const int J = n * n;
    MaskEnsemble ens;
    ens.family = MaskFamily::Hadamard;
    ens.masks.assign(J, Image::square(n));
    parallel_for(J, 256, [&](int64_t begin, int64_t end) {
        for (int64_t j = begin; j < end; ++j) {
            std::vector<double>& px = ens.masks[j].data();
            for (uint64_t x = 0; x < static_cast<uint64_t>(J); ++x)
                px[x] = (__builtin_popcountll(static_cast<uint64_t>(j) & x) & 1) ? 0.0 : 1.0;
        }
    });
    refresh_stats(ens);
    return ens;
}

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; static_cast<long long>(d) * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int mod_pow(long long base, long long exp, long long mod) {
    long long result = 1;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) result = result * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return static_cast<int>(result);
}

// Legendre symbol (m|p) for m in
// 1..p-1: +1 for quadratic residues, -1 otherwise.
int legendre(int m, int p) {
    return mod_pow(m, (p - 1) / 2, p) == 1 ? 1 : -1;
}

} // namespace

MaskEnsemble gen_ura_scan(int p) {
    if (p < 3 || !is_prime(p))
        throw InvalidArgument("gen_ura_scan: p must be a prime >= 3, got " + std::to_string(p));

    // Base sign array: zero at the origin, elsewhere the sign of the line
    // direction through the origin that the point lies on.  Signs are the
    // Legendre characters on slopes 1..p-1, +1 on slope 0 and -1 on the
    // vertical direction, which balances the p+1 directions exactly and
    // gives the array a flat power spectrum (hence two-valued cyclic
    // autocorrelation and an exactly orthogonal mean-corrected Gram).
    std::vector<int> inv(p, 0);
    for (int x = 1; x < p; ++x) inv[x] = mod_pow(x, p - 2, p);
    std::vector<double> base(static_cast<size_t>(p) * p, 0.0);
    for (int y = 0; y < p; ++y)
        for (int x = 0; x < p; ++x) {
            if (x == 0 && y == 0) continue;
            int sign;
            if (x == 0) sign = -1;                   // vertical direction
            else {
                const int slope = static_cast<int>(static_cast<long long>(y) * inv[x] % p);
                sign = slope == 0 ? 1 : legendre(slope, p);
            }
            base[static_cast<size_t>(y) * p + x] = sign;
        }

    const int J = p * p;
    MaskEnsemble ens;
    ens.family = MaskFamily::UraScan;
    ens.masks.assign(J, Image::square(p));
    for (int tr = 0; tr < p; ++tr)
        for (int tc = 0; tc < p; ++tc) {
            Image& m = ens.masks[static_cast<size_t>(tr) * p + tc];
            for (int r = 0; r < p; ++r)
                for (int c = 0; c < p; ++c) {
                    const int br = (r - tr + p) % p;
                    const int bc = (c - tc + p) % p;
                    m.at(r, c) = (base[static_cast<size_t>(br) * p + bc] + 1.0) * 0.5;
                }
        }
    refresh_stats(ens);
    return ens;
}

MaskEnsemble gen_pinhole_scan(int n) {
    check_ensemble_shape(n, 1);
    const int J = n * n;
    MaskEnsemble ens;
    ens.family = MaskFamily::PinholeScan;
    ens.masks.assign(J, Image::square(n));
    for (int j = 0; j < J; ++j) ens.masks[j].data()[j] = 1.0;
    refresh_stats(ens);
    return ens;
}

std::vector<double> gram_mean_corrected(const MaskEnsemble& ens, size_t memory_budget_bytes) {
    if (ens.masks.empty()) throw InvalidArgument("gram_mean_corrected: empty ensemble");
    const size_t J = ens.masks.size();
    const size_t px = ens.masks.front().size();
    const size_t bytes = (J * J + J * px) * sizeof(double);
    if (bytes > memory_budget_bytes)
        std::fprintf(stderr,
                     "ghostsim: warning: gram_mean_corrected working set %.2f GiB exceeds "
                     "budget %.2f GiB\n",
                     static_cast<double>(bytes) / (1024.0 * 1024.0 * 1024.0),
                     static_cast<double>(memory_budget_bytes) / (1024.0 * 1024.0 * 1024.0));

    std::vector<double> mean(px, 0.0);
    for (const Image& m : ens.masks)
        for (size_t i = 0; i < px; ++i) mean[i] += m.data()[i];
    for (double& v : mean) v /= static_cast<double>(J);

    std::vector<double> gram(J * J, 0.0);
    parallel_for(static_cast<int64_t>(J), 16, [&](int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i) {
            const std::vector<double>& a = ens.masks[i].data();
            for (size_t j = i; j < J; ++j) {
                const std::vector<double>& b = ens.masks[j].data();
                double dot = 0.0;
                for (size_t x = 0; x < px; ++x)
                    dot += (a[x] - mean[x]) * (b[x] - mean[x]);
                gram[static_cast<size_t>(i) * J + j] = dot;
                gram[j * J + static_cast<size_t>(i)] = dot;
            }
        }
    });
    return gram;
}

} // namespace ghostsim
