// SPDX-License-Identifier: Apache-2.0
//
// Tests for mask-ensemble generators, Gaussian correlation shaping, prefix
// and tiling helpers, and the mean-corrected Gram diagnostic.

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ghostsim/errors.hpp"
#include "ghostsim/masks.hpp"

using namespace ghostsim;

namespace {

// Brute-force mean-corrected Gram, the oracle for gram_mean_corrected.
std::vector<double> gram_direct(const MaskEnsemble& ens) {
    const size_t npx = static_cast<size_t>(ens.n) * ens.n;
    std::vector<double> mean(npx, 0.0);
    for (const Image& m : ens.masks)
        for (size_t x = 0; x < npx; ++x) mean[x] += m.data()[x];
    for (double& v : mean) v /= ens.J;

    std::vector<double> g(static_cast<size_t>(ens.J) * ens.J, 0.0);
    for (int i = 0; i < ens.J; ++i)
        for (int j = 0; j < ens.J; ++j) {
            double s = 0.0;
            for (size_t x = 0; x < npx; ++x)
                s += (ens.masks[i].data()[x] - mean[x]) * (ens.masks[j].data()[x] - mean[x]);
            g[static_cast<size_t>(i) * ens.J + j] = s;
        }
    return g;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// 1-D taps of the periodic truncated Gaussian used by blur_masks, normalized
// to unit sum, as declared in the header (truncation at 6 sigma).
std::vector<double> blur_taps(double sigma_px) {
    const int radius = static_cast<int>(std::floor(6.0 * sigma_px));
    std::vector<double> taps(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double w = std::exp(-0.5 * (k / sigma_px) * (k / sigma_px));
        taps[static_cast<size_t>(k + radius)] = w;
        sum += w;
    }
    for (double& t : taps) t /= sum;
    return taps;
}

} // namespace

TEST_CASE("gen_random_binary: argument validation") {
    Seed s{1, "masks"};
    CHECK_THROWS_AS(gen_random_binary(0, 4, 0.5, s), InvalidArgument);
    CHECK_THROWS_AS(gen_random_binary(4, 0, 0.5, s), InvalidArgument);
    CHECK_THROWS_AS(gen_random_binary(4, 4, -0.1, s), InvalidArgument);
    CHECK_THROWS_AS(gen_random_binary(4, 4, 1.1, s), InvalidArgument);
}

TEST_CASE("gen_random_binary: values, stats, and determinism") {
    const int n = 32, J = 256;
    const double mu = 0.5;
    MaskEnsemble ens = gen_random_binary(n, J, mu, Seed{42, "bin"});
    CHECK(ens.n == n);
    CHECK(ens.J == J);
    CHECK(ens.family == MaskFamily::RandomBinary);
    CHECK(static_cast<int>(ens.masks.size()) == J);
    CHECK(!ens.constant_sum.has_value());

    for (const Image& m : ens.masks) {
        CHECK(m.n() == n);
        for (double v : m.data()) CHECK((v == 0.0 || v == 1.0));
    }

    // Sample mean within 4 standard errors of mu; sigma near sqrt(mu(1-mu)).
    const double N = double(J) * n * n;
    CHECK(std::abs(ens.mu_A - mu) < 4.0 * std::sqrt(mu * (1 - mu) / N));
    CHECK(ens.sigma_A == doctest::Approx(0.5).epsilon(0.01));

    MaskEnsemble again = gen_random_binary(n, J, mu, Seed{42, "bin"});
    for (int j = 0; j < J; ++j)
        CHECK(again.masks[j].data() == ens.masks[j].data());

    MaskEnsemble other = gen_random_binary(n, J, mu, Seed{43, "bin"});
    CHECK(other.masks[0].data() != ens.masks[0].data());
}

TEST_CASE("gen_random_binary: biased coin matches requested mean") {
    MaskEnsemble ens = gen_random_binary(16, 512, 0.75, Seed{7, "p75"});
    const double N = 512.0 * 16 * 16;
    CHECK(std::abs(ens.mu_A - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / N));
}

TEST_CASE("gen_random_gray: uniform support and sigma bound") {
    const double mu = 0.6, sig = 0.2;
    MaskEnsemble ens = gen_random_gray(16, 128, mu, sig, Seed{5, "gray"});
    CHECK(ens.family == MaskFamily::RandomGray);
    const double half = std::sqrt(3.0) * sig;
    for (const Image& m : ens.masks)
        for (double v : m.data()) {
            CHECK(v >= mu - half - 1e-12);
            CHECK(v <= mu + half + 1e-12);
        }
    const double N = 128.0 * 16 * 16;
    CHECK(std::abs(ens.mu_A - mu) < 4.0 * sig / std::sqrt(N));
    CHECK(ens.sigma_A == doctest::Approx(sig).epsilon(0.02));

    // sigma = 0 produces constant masks, which have a constant sum.
    MaskEnsemble flat = gen_random_gray(8, 16, 0.5, 0.0, Seed{5, "flat"});
    CHECK(flat.sigma_A == 0.0);
    CHECK(flat.constant_sum.has_value());
    CHECK(*flat.constant_sum == doctest::Approx(0.5 * 64).epsilon(1e-12));

    // The uniform support must fit inside [0,1].
    const double bound = std::min(0.6, 0.4) / std::sqrt(3.0);
    CHECK_NOTHROW(gen_random_gray(8, 4, 0.6, bound * 0.999, Seed{1, "ok"}));
    CHECK_THROWS_AS(gen_random_gray(8, 4, 0.6, bound * 1.01, Seed{1, "no"}),
                    InvalidArgument);
    CHECK_THROWS_AS(gen_random_gray(8, 4, 0.5, -0.1, Seed{1, "no"}), InvalidArgument);
}

TEST_CASE("blur_masks: sub-threshold sigma passes masks through") {
    MaskEnsemble ens = gen_random_binary(16, 8, 0.5, Seed{9, "blur0"});
    MaskEnsemble out = blur_masks(ens, 0.04);
    CHECK(out.family == MaskFamily::Blurred);
    for (int j = 0; j < ens.J; ++j) CHECK(out.masks[j].data() == ens.masks[j].data());
    CHECK_THROWS_AS(blur_masks(ens, -1.0), InvalidArgument);
}

TEST_CASE("blur_masks: per-mask means preserved, iid variance scaled by taps") {
    const int n = 64, J = 64;
    const double sigma_g = 1.0;
    MaskEnsemble ens = gen_random_binary(n, J, 0.5, Seed{10, "blur1"});
    MaskEnsemble out = blur_masks(ens, sigma_g);
    CHECK(out.family == MaskFamily::Blurred);
    CHECK(out.n == n);
    CHECK(out.J == J);

    for (int j = 0; j < J; ++j) {
        double before = 0.0, after = 0.0;
        for (double v : ens.masks[j].data()) before += v;
        for (double v : out.masks[j].data()) after += v;
        CHECK(after == doctest::Approx(before).epsilon(1e-12));
        for (double v : out.masks[j].data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    // Filtering iid pixels of variance s2 with a separable kernel leaves
    // variance s2 * (sum of squared 1-D taps)^2.  For binary 0/1 masks at
    // mu = 0.5, s2 = 1/4.
    const std::vector<double> taps = blur_taps(sigma_g);
    double t2 = 0.0;
    for (double t : taps) t2 += t * t;
    const double expected_var = 0.25 * t2 * t2;
    const double measured_var = out.sigma_A * out.sigma_A;
    // 4 standard errors of a variance estimate from J*n*n weakly-correlated
    // samples, padded for the correlation the kernel introduces.
    const double N = double(J) * n * n;
    const double tol = 8.0 * expected_var * std::sqrt(2.0 / N) * (2.0 * sigma_g + 1.0);
    CHECK(std::abs(measured_var - expected_var) < tol);
}

TEST_CASE("blur_masks: constant masks are unchanged") {
    MaskEnsemble flat = gen_random_gray(16, 4, 0.5, 0.0, Seed{3, "flatblur"});
    MaskEnsemble out = blur_masks(flat, 2.0);
    for (int j = 0; j < 4; ++j)
        for (double v : out.masks[j].data())
            CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gen_hadamard: closed-form values and exact Gram") {
    CHECK_THROWS_AS(gen_hadamard(3), InvalidArgument);
    CHECK_THROWS_AS(gen_hadamard(0), InvalidArgument);
    CHECK_THROWS_AS(gen_hadamard(1), InvalidArgument);

    const int n = 4;
    MaskEnsemble ens = gen_hadamard(n);
    CHECK(ens.family == MaskFamily::Hadamard);
    CHECK(ens.J == n * n);
    // Mask j, pixel x (row-major): (1 + (-1)^popcount(j & x)) / 2.
    for (int j = 0; j < ens.J; ++j)
        for (int x = 0; x < n * n; ++x) {
            const int bit = std::popcount(static_cast<unsigned>(j & x)) & 1;
            const double want = bit ? 0.0 : 1.0;
            CHECK(ens.masks[j].data()[static_cast<size_t>(x)] == want);
        }
    // Mask 0 is all ones.
    for (double v : ens.masks[0].data()) CHECK(v == 1.0);
    CHECK(!ens.constant_sum.has_value()); // mask 0 sums to n^2, others to n^2/2

    // Mean-corrected Gram == (J/4) (I - 11^T / J), exactly in floating point:
    // all entries are small dyadic rationals.
    const double gamma = ens.J / 4.0;
    std::vector<double> g = gram_mean_corrected(ens);
    for (int i = 0; i < ens.J; ++i)
        for (int j = 0; j < ens.J; ++j) {
            const double want = gamma * ((i == j ? 1.0 : 0.0) - 1.0 / ens.J);
            CHECK(g[static_cast<size_t>(i) * ens.J + j] == want);
        }
}

TEST_CASE("gen_hadamard: n=16 spot checks against the sign formula") {
    MaskEnsemble ens = gen_hadamard(16);
    CHECK(ens.J == 256);
    for (int j : {1, 17, 100, 255})
        for (int x : {0, 3, 64, 255}) {
            const int bit = std::popcount(static_cast<unsigned>(j & x)) & 1;
            CHECK(ens.masks[j].data()[static_cast<size_t>(x)] == (bit ? 0.0 : 1.0));
        }
}

TEST_CASE("gen_ura_scan: values, sums, autocorrelation, exact Gram") {
    CHECK_THROWS_AS(gen_ura_scan(2), InvalidArgument);
    CHECK_THROWS_AS(gen_ura_scan(4), InvalidArgument);
    CHECK_THROWS_AS(gen_ura_scan(9), InvalidArgument);

    const int p = 5;
    MaskEnsemble ens = gen_ura_scan(p);
    CHECK(ens.family == MaskFamily::UraScan);
    CHECK(ens.n == p);
    CHECK(ens.J == p * p);

    // Every mask: values in {0, 1/2, 1}, exactly one 1/2 pixel, exact sum p^2/2.
    for (const Image& m : ens.masks) {
        int halves = 0;
        double sum = 0.0;
        for (double v : m.data()) {
            CHECK((v == 0.0 || v == 0.5 || v == 1.0));
            if (v == 0.5) ++halves;
            sum += v;
        }
        CHECK(halves == 1);
        CHECK(sum == p * p / 2.0);
    }
    CHECK(ens.constant_sum.has_value());
    CHECK(*ens.constant_sum == p * p / 2.0);

    // Masks are cyclic shifts of mask 0: mask index j = dr*p + dc is the
    // base pattern translated forward by (dr, dc).
    const Image& base = ens.masks[0];
    for (int dr = 0; dr < p; ++dr)
        for (int dc = 0; dc < p; ++dc) {
            const Image& m = ens.masks[dr * p + dc];
            for (int r = 0; r < p; ++r)
                for (int c = 0; c < p; ++c)
                    CHECK(m.at(r, c) == base.at((r - dr + p) % p, (c - dc + p) % p));
        }

    // Flat-spectrum property of the sign array s = 2A - 1: its cyclic
    // autocorrelation at every nonzero shift is exactly -1 (so the power
    // spectrum is flat away from DC).
    std::vector<double> sign(static_cast<size_t>(p) * p);
    for (int x = 0; x < p * p; ++x) sign[static_cast<size_t>(x)] = 2.0 * base.data()[static_cast<size_t>(x)] - 1.0;
    for (int dr = 0; dr < p; ++dr)
        for (int dc = 0; dc < p; ++dc) {
            if (dr == 0 && dc == 0) continue;
            double corr = 0.0;
            for (int r = 0; r < p; ++r)
                for (int c = 0; c < p; ++c)
                    corr += sign[static_cast<size_t>(r) * p + c] *
                            sign[static_cast<size_t>(((r + dr) % p)) * p + (c + dc) % p];
            CHECK(corr == -1.0);
        }

    // Mean-corrected Gram == (p^2/4) (I - 11^T/J), bit-exact.
    const double gamma = ens.J / 4.0;
    std::vector<double> g = gram_mean_corrected(ens);
    for (int i = 0; i < ens.J; ++i)
        for (int j = 0; j < ens.J; ++j) {
            const double want = gamma * ((i == j ? 1.0 : 0.0) - 1.0 / ens.J);
            CHECK(g[static_cast<size_t>(i) * ens.J + j] == want);
        }
}

TEST_CASE("gen_pinhole_scan: delta masks with exact Gram") {
    const int n = 4;
    MaskEnsemble ens = gen_pinhole_scan(n);
    CHECK(ens.family == MaskFamily::PinholeScan);
    CHECK(ens.J == n * n);
    CHECK(ens.constant_sum.has_value());
    CHECK(*ens.constant_sum == 1.0);
    for (int j = 0; j < ens.J; ++j) {
        double sum = 0.0;
        for (int x = 0; x < n * n; ++x) {
            const double v = ens.masks[j].data()[static_cast<size_t>(x)];
            CHECK((v == 0.0 || v == 1.0));
            if (x == j) CHECK(v == 1.0);
            sum += v;
        }
        CHECK(sum == 1.0);
    }
    // Gram of delta masks: delta_ij - 1/J, exactly.
    std::vector<double> g = gram_mean_corrected(ens);
    for (int i = 0; i < ens.J; ++i)
        for (int j = 0; j < ens.J; ++j) {
            const double want = (i == j ? 1.0 : 0.0) - 1.0 / ens.J;
            CHECK(g[static_cast<size_t>(i) * ens.J + j] == want);
        }
    CHECK_THROWS_AS(gen_pinhole_scan(0), InvalidArgument);
}

TEST_CASE("gram_mean_corrected: hand-computed three-mask oracle") {
    // Masks on a 2x2 grid: (1,0,0,1), (1,1,0,0), (0,1,1,0).
    MaskEnsemble ens;
    ens.n = 2;
    ens.J = 3;
    Image m0 = Image::square(2), m1 = Image::square(2), m2 = Image::square(2);
    m0.data() = {1, 0, 0, 1};
    m1.data() = {1, 1, 0, 0};
    m2.data() = {0, 1, 1, 0};
    ens.masks = {m0, m1, m2};
    refresh_stats(ens);

    std::vector<double> g = gram_mean_corrected(ens);
    const double want[9] = {10.0 / 9, -2.0 / 9, -8.0 / 9,
                            -2.0 / 9, 4.0 / 9,  -2.0 / 9,
                            -8.0 / 9, -2.0 / 9, 10.0 / 9};
    for (int i = 0; i < 9; ++i)
        CHECK(g[static_cast<size_t>(i)] == doctest::Approx(want[i]).epsilon(1e-14));

    // And it agrees with the brute-force oracle.
    CHECK(max_abs_diff(g, gram_direct(ens)) < 1e-14);
}

TEST_CASE("gram_mean_corrected: random ensemble matches brute force; tiny budget") {
    MaskEnsemble ens = gen_random_gray(8, 12, 0.5, 0.1, Seed{21, "gram"});
    std::vector<double> g = gram_mean_corrected(ens);
    CHECK(max_abs_diff(g, gram_direct(ens)) < 1e-12);
    // A tiny memory budget only warns; the result must be identical.
    std::vector<double> g2 = gram_mean_corrected(ens, 16);
    CHECK(g2 == g);
}

TEST_CASE("take_prefix: first J masks with stats recomputed") {
    MaskEnsemble ens = gen_random_binary(8, 32, 0.5, Seed{33, "prefix"});
    MaskEnsemble pre = take_prefix(ens, 10);
    CHECK(pre.J == 10);
    CHECK(pre.family == ens.family);
    for (int j = 0; j < 10; ++j) CHECK(pre.masks[j].data() == ens.masks[j].data());

    EnsembleStats st = ensemble_stats(pre);
    CHECK(pre.mu_A == st.mu_A);
    CHECK(pre.sigma_A == st.sigma_A);

    CHECK_THROWS_AS(take_prefix(ens, 0), InvalidArgument);
    CHECK_THROWS_AS(take_prefix(ens, 33), InvalidArgument);
    MaskEnsemble all = take_prefix(ens, 32);
    CHECK(all.J == 32);
}

TEST_CASE("tile_to: cyclic repetition of a complete scan") {
    MaskEnsemble ens = gen_pinhole_scan(3); // J = 9
    MaskEnsemble tiled = tile_to(ens, 21);
    CHECK(tiled.J == 21);
    CHECK(tiled.family == ens.family);
    for (int j = 0; j < 21; ++j)
        CHECK(tiled.masks[j].data() == ens.masks[j % 9].data());
    CHECK(tiled.constant_sum.has_value());
    CHECK_THROWS_AS(tile_to(ens, 0), InvalidArgument);
}

TEST_CASE("ensemble_stats: constant-sum detection") {
    MaskEnsemble had = gen_hadamard(4);
    CHECK(!ensemble_stats(had).constant_sum.has_value());
    MaskEnsemble ura = gen_ura_scan(5);
    CHECK(ensemble_stats(ura).constant_sum.has_value());
}
