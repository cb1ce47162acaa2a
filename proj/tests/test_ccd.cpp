// SPDX-License-Identifier: Apache-2.0
//
// Tests for the CCD module: sandpaper speckle, the g2 correlation profile,
// the glyph stencil, frame-transfer read-out smear, frame synthesis,
// bucket extraction, and the tabletop-experiment replication.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ghostsim/ccd.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/masks.hpp"

using namespace ghostsim;

TEST_CASE("CcdConfig: validation rules") {
    CcdConfig ok;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.binned_rows() == 1300);
    CHECK(ok.binned_cols() == 256);

    CcdConfig bad = ok;
    bad.rows = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = ok;
    bad.binning = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = ok;
    bad.binning = 7; // 1300 % 7 != 0
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = ok;
    bad.readout_s = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = ok;
    bad.rows = 4;
    bad.cols = 4;
    bad.binning = 4; // binned frame collapses to 1x1
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("gen_sandpaper_speckle: range, moments, determinism") {
    const int J = 150, n = 128;
    const double fov = 2.56; // keeps the default 20 um pitch
    MaskEnsemble ens = gen_sandpaper_speckle(J, n, fov, Seed{21, "sp"});
    CHECK(ens.J == J);
    CHECK(ens.n == n);
    CHECK(ens.family == MaskFamily::Blurred);
    CHECK(ens.masks.front().pitch_mm() == doctest::Approx(0.02).epsilon(1e-12));

    for (const Image& m : ens.masks)
        for (double v : m.data()) {
            CHECK(v >= 0.5);
            CHECK(v <= 1.0);
        }
    CHECK(ens.mu_A == doctest::Approx(0.75).epsilon(0.01));
    CHECK(ens.sigma_A == doctest::Approx(0.0746).epsilon(0.10));

    MaskEnsemble again = gen_sandpaper_speckle(J, n, fov, Seed{21, "sp"});
    CHECK(again.masks[0].data() == ens.masks[0].data());
    CHECK(again.masks[J - 1].data() == ens.masks[J - 1].data());
    MaskEnsemble other = gen_sandpaper_speckle(J, n, fov, Seed{22, "sp"});
    CHECK(other.masks[0].data() != ens.masks[0].data());

    CHECK_THROWS_AS(gen_sandpaper_speckle(0, n, fov, Seed{1, "x"}), InvalidArgument);
    CHECK_THROWS_AS(gen_sandpaper_speckle(4, n, -1.0, Seed{1, "x"}), InvalidArgument);
}

TEST_CASE("g2_profile: speckle contrast and correlation width") {
    MaskEnsemble ens = gen_sandpaper_speckle(150, 128, 2.56, Seed{23, "g2"});
    G2Profile g2 = g2_profile(ens);
    REQUIRE(!g2.value.empty());
    CHECK(g2.radius_mm.front() == 0.0);
    CHECK(g2.value.front() == g2.max);
    // Low-contrast pseudo-thermal light: g2(0) just above 1.
    CHECK(g2.max > 1.005);
    CHECK(g2.max < 1.015);
    // Gaussian diffuser blur of 0.117 mm: correlation FWHM 4*sigma*sqrt(ln 2)
    // = 0.390 mm, measured within ~10%.
    CHECK(g2.fwhm_mm > 0.36);
    CHECK(g2.fwhm_mm < 0.433);
    // Profile decays monotonically near the origin.
    CHECK(g2.value[1] < g2.value[0]);
}

TEST_CASE("g2_profile: error conditions") {
    MaskEnsemble few = gen_sandpaper_speckle(99, 64, 1.28, Seed{24, "few"});
    CHECK_THROWS_AS(g2_profile(few), InvalidArgument);

    // Constant masks: no fluctuations, g2(0) == 1 exactly.
    MaskEnsemble flat = gen_random_gray(32, 128, 0.5, 0.0, Seed{25, "flat"});
    CHECK_THROWS_AS(g2_profile(flat), NumericError);
}

TEST_CASE("g2_profile: delta-correlated masks give a one-pixel width") {
    MaskEnsemble white = gen_random_binary(64, 200, 0.5, Seed{26, "white"});
    G2Profile g2 = g2_profile(white);
    // Uncorrelated pixels: the profile drops to 1 by the first bin, so the
    // interpolated FWHM is one pixel pitch (1/64 mm at the default pitch).
    const double pitch = 1.0 / 64.0;
    CHECK(g2.fwhm_mm == doctest::Approx(pitch).epsilon(0.25));
    CHECK(g2.max > 1.0);
}

TEST_CASE("make_stencil: binary glyphs at native rotation") {
    CHECK_THROWS_AS(make_stencil(63), InvalidArgument);

    Image st = make_stencil(256);
    CHECK(st.n() == 256);
    CHECK(st.pitch_mm() == doctest::Approx(0.02).epsilon(1e-12));
    int on = 0;
    for (double v : st.data()) {
        CHECK((v == 0.0 || v == 1.0));
        if (v == 1.0) ++on;
    }
    // Thin strokes: a small but nontrivial fill fraction.
    const double frac = double(on) / st.size();
    CHECK(frac > 0.05);
    CHECK(frac < 0.30);
}

TEST_CASE("make_stencil: rotation resamples without changing mass much") {
    Image st = make_stencil(256);
    Image rot = make_stencil(256, 60.0);
    double mass0 = 0.0, mass1 = 0.0;
    for (double v : st.data()) mass0 += v;
    for (double v : rot.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        mass1 += v;
    }
    // Bilinear rotation preserves mass except at the clipped corners.
    CHECK(mass1 == doctest::Approx(mass0).epsilon(0.10));
    // And it is not the identity.
    CHECK(rot.data() != st.data());
}

TEST_CASE("readout_smear: no read-out time means a plain exposure") {
    CcdConfig ccd;
    ccd.rows = 8;
    ccd.cols = 4;
    ccd.readout_s = 0.0;
    Image rate(8, 4);
    for (size_t i = 0; i < rate.size(); ++i) rate.data()[i] = double(i % 5);
    Image out = readout_smear(rate, 0.25, ccd);
    for (size_t i = 0; i < rate.size(); ++i)
        CHECK(out.data()[i] == doctest::Approx(0.25 * rate.data()[i]).epsilon(1e-15));
}

TEST_CASE("readout_smear: hand-computed cascade on a tiny sensor") {
    CcdConfig ccd;
    ccd.rows = 4;
    ccd.cols = 2;
    ccd.readout_s = 0.8; // dwell = 0.2 per row
    Image rate(4, 2);
    // Column 0: rates 1, 2, 3, 4 down the read-out order; column 1 zero
    // except row 2.
    rate.at(0, 0) = 1.0;
    rate.at(1, 0) = 2.0;
    rate.at(2, 0) = 3.0;
    rate.at(3, 0) = 4.0;
    rate.at(2, 1) = 5.0;

    Image out = readout_smear(rate, 0.1, ccd);
    // Row r collects t0*rate(r) plus dwell * sum of rates above (read first).
    CHECK(out.at(0, 0) == doctest::Approx(0.1 * 1.0).epsilon(1e-15));
    CHECK(out.at(1, 0) == doctest::Approx(0.1 * 2.0 + 0.2 * 1.0).epsilon(1e-15));
    CHECK(out.at(2, 0) == doctest::Approx(0.1 * 3.0 + 0.2 * 3.0).epsilon(1e-15));
    CHECK(out.at(3, 0) == doctest::Approx(0.1 * 4.0 + 0.2 * 6.0).epsilon(1e-15));
    CHECK(out.at(0, 1) == 0.0);
    CHECK(out.at(1, 1) == 0.0);
    CHECK(out.at(2, 1) == doctest::Approx(0.1 * 5.0).epsilon(1e-15));
    CHECK(out.at(3, 1) == doctest::Approx(0.2 * 5.0).epsilon(1e-15));
}

TEST_CASE("readout_smear: uniform scene sums to the equivalent exposure") {
    // For a uniform rate the total collected charge equals a shuttered
    // exposure of t0 + t1 (R-1) / (2R): the identity behind dose accounting
    // for shutter-free acquisition.
    CcdConfig ccd;
    ccd.rows = 64;
    ccd.cols = 8;
    ccd.readout_s = 0.93;
    const double rho = 3.0, t0 = 0.01;
    const int R = ccd.binned_rows();
    Image rate(R, 8);
    for (double& v : rate.data()) v = rho;

    Image out = readout_smear(rate, t0, ccd);
    for (int c = 0; c < 8; ++c) {
        double total = 0.0;
        for (int r = 0; r < R; ++r) total += out.at(r, c);
        const double t_eff = t0 + ccd.readout_s * (R - 1) / (2.0 * R);
        CHECK(total == doctest::Approx(R * rho * t_eff).epsilon(1e-12));
    }
}

TEST_CASE("readout_smear: uncleared sensor adds the complementary pass") {
    CcdConfig ccd;
    ccd.rows = 16;
    ccd.cols = 2;
    ccd.readout_s = 0.4;
    ccd.cleared_before_exposure = false;
    const double rho = 2.0, t0 = 0.05;
    Image rate(16, 2);
    for (double& v : rate.data()) v = rho;
    Image out = readout_smear(rate, t0, ccd);
    // Every row passes all other 15 rows across the two transfer passes:
    // Q = t0 rho + (t1/R) * 15 rho, independent of the row.
    const double want = t0 * rho + 0.4 / 16.0 * 15.0 * rho;
    for (double v : out.data()) CHECK(v == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("readout_smear: validation") {
    CcdConfig ccd;
    ccd.rows = 8;
    ccd.cols = 4;
    Image wrong(4, 4);
    CHECK_THROWS_AS(readout_smear(wrong, 0.1, ccd), DimensionMismatch);
    Image rate(8, 4);
    rate.at(0, 0) = -1.0;
    CHECK_THROWS_AS(readout_smear(rate, 0.1, ccd), InvalidArgument);
    rate.at(0, 0) = 0.0;
    CHECK_THROWS_AS(readout_smear(rate, -0.1, ccd), InvalidArgument);
}

TEST_CASE("zhang_frame: dark-only scenes are shutter-independent") {
    CcdConfig ccd;
    ccd.rows = 64;
    ccd.cols = 32;
    ccd.readout_s = 0.12;
    ccd.binning = 8;
    Image zero = Image::square(32);
    Image mask = Image::square(32);
    for (double& v : mask.data()) v = 0.75;

    Image with_shutter = zhang_frame(zero, mask, 0.15, ccd, true, Seed{30, "dark"});
    Image without = zhang_frame(zero, mask, 0.15, ccd, false, Seed{30, "dark"});
    CHECK(with_shutter.data() == without.data());
    CHECK(with_shutter.rows() == 8);
    CHECK(with_shutter.cols() == 4);

    // Dark counts average 0.01 * 100 * (t0 + t1) = 0.27 per binned pixel.
    double mean = 0.0;
    for (double v : with_shutter.data()) mean += v;
    mean /= double(with_shutter.size());
    CHECK(mean == doctest::Approx(0.27).epsilon(0.9)); // loose: few pixels
}

TEST_CASE("zhang_frame: deterministic and correctly scaled in the scene block") {
    CcdConfig ccd;
    ccd.rows = 96;
    ccd.cols = 64;
    ccd.readout_s = 0.0; // isolate the plain exposure path
    ccd.binning = 8;
    Image T = Image::square(64);
    for (double& v : T.data()) v = 0.5;
    Image mask = Image::square(64);
    for (double& v : mask.data()) v = 0.8;
    const double t0 = 0.5;

    Image f1 = zhang_frame(T, mask, t0, ccd, true, Seed{31, "frame"});
    Image f2 = zhang_frame(T, mask, t0, ccd, true, Seed{31, "frame"});
    CHECK(f1.data() == f2.data());
    Image f3 = zhang_frame(T, mask, t0, ccd, true, Seed{32, "frame"});
    CHECK(f1.data() != f3.data());

    // Scene block: expected 120 * 0.5 * 0.8 * 64 px * 0.5 s = 1536 per
    // binned pixel (plus 0.01 * Poisson(100 t0) dark). 8 scene rows of 8
    // binned columns = 64 samples; 4-sigma band on the mean.
    double scene_mean = 0.0;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) scene_mean += f1.at(r, c);
    scene_mean /= 64.0;
    const double lambda = 120.0 * 0.5 * 0.8 * 64.0 * t0;
    CHECK(std::abs(scene_mean - (lambda + 0.5)) < 4.0 * std::sqrt(lambda / 64.0) + 1.0);

    // Rows beyond the scene hold only dark counts.
    double dark_mean = 0.0;
    for (int r = 8; r < 12; ++r)
        for (int c = 0; c < 8; ++c) dark_mean += f1.at(r, c);
    dark_mean /= 32.0;
    CHECK(dark_mean < 5.0);

    // Validation paths.
    CHECK_THROWS_AS(zhang_frame(T, Image::square(32), t0, ccd, true, Seed{1, "x"}),
                    DimensionMismatch);
    CcdConfig narrow = ccd;
    narrow.cols = 32;
    CHECK_THROWS_AS(zhang_frame(T, mask, t0, narrow, true, Seed{1, "x"}),
                    DimensionMismatch);
    CcdConfig shallow = ccd;
    shallow.rows = 32; // scene needs 64/8 = 8 binned rows but sensor has 4
    CHECK_THROWS_AS(zhang_frame(T, mask, t0, shallow, true, Seed{1, "x"}),
                    DimensionMismatch);
}

TEST_CASE("frame_to_bucket: three mitigation modes by hand") {
    Image frame(4, 2);
    // Column 0: 1, 2, 3, 4; column 1: 5, 6, 7, 8.
    for (int r = 0; r < 4; ++r) {
        frame.at(r, 0) = r + 1.0;
        frame.at(r, 1) = r + 5.0;
    }

    CHECK(frame_to_bucket(frame, SmearMitigation::None) == doctest::Approx(36.0));

    BucketRegion crop;
    crop.row_begin = 1;
    crop.row_end = 3; // rows 1 and 2: (2+3) + (6+7)
    CHECK(frame_to_bucket(frame, SmearMitigation::CropSmear, crop) ==
          doctest::Approx(18.0));

    BucketRegion dark;
    dark.row_begin = 0;
    dark.row_end = 2; // signal rows 0-1
    dark.dark_row_begin = 2;
    dark.dark_row_end = 4; // per-column dark means: 3.5 and 7.5
    // Sum over signal rows of (value - column dark mean):
    // (1-3.5)+(2-3.5) + (5-7.5)+(6-7.5) = -8.
    CHECK(frame_to_bucket(frame, SmearMitigation::DarkfieldSubtract, dark) ==
          doctest::Approx(-8.0));

    BucketRegion bad;
    bad.row_begin = 3;
    bad.row_end = 2;
    CHECK_THROWS_AS(frame_to_bucket(frame, SmearMitigation::CropSmear, bad),
                    InvalidArgument);
    bad.row_begin = 0;
    bad.row_end = 5;
    CHECK_THROWS_AS(frame_to_bucket(frame, SmearMitigation::CropSmear, bad),
                    InvalidArgument);
    BucketRegion nodark;
    nodark.row_begin = 0;
    nodark.row_end = 2;
    CHECK_THROWS_AS(frame_to_bucket(frame, SmearMitigation::DarkfieldSubtract, nodark),
                    InvalidArgument);
}

TEST_CASE("run_zhang: ghost-imaging smoke run at reduced mask count") {
    ZhangResult res = run_zhang(ZhangExperiment::II, true, Seed{40, "zii"}, 120);
    CHECK(res.experiment == ZhangExperiment::II);
    CHECK(res.shutter);
    CHECK(res.t0_s == doctest::Approx(1e-6));
    CHECK(res.recon.rows() == 32);
    CHECK(res.recon.cols() == 32);
    CHECK(res.reference.rows() == 32);
    CHECK(res.reference.cols() == 32);
    CHECK(res.sample_frame.rows() == 163); // 1304 / 8
    CHECK(res.sample_frame.cols() == 32);
    CHECK(res.buckets.J == 120);
    CHECK(std::isfinite(res.r));
    CHECK(res.r >= -1.0);
    CHECK(res.r <= 1.0);
    CHECK(std::isfinite(res.r_control));

    // Deterministic replication.
    ZhangResult again = run_zhang(ZhangExperiment::II, true, Seed{40, "zii"}, 120);
    CHECK(again.r == res.r);
    CHECK(again.r_control == res.r_control);
    CHECK(again.buckets.values == res.buckets.values);

    CHECK_THROWS_AS(run_zhang(ZhangExperiment::II, true, Seed{40, "z"}, 50),
                    InvalidArgument);
}

TEST_CASE("run_zhang: direct-exposure arm produces a full-resolution frame") {
    ZhangResult res = run_zhang(ZhangExperiment::III, true, Seed{41, "ziii"}, 100);
    CHECK(res.recon.rows() == 1300);
    CHECK(res.recon.cols() == 256);
    CHECK(res.reference.rows() == 1300);
    CHECK(res.buckets.J == 1);
    // A direct shuttered exposure runs at ~1.2 photons/pixel, so per-pixel
    // shot noise caps the correlation with the expected image near 0.58;
    // the value is stable to +-0.005 across seeds.
    CHECK(res.r > 0.5);
    CHECK(res.r_control == 0.0);
}
