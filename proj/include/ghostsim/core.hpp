// SPDX-License-Identifier: Apache-2.0
//
// Core value types shared by every module: dense images, seeds, noise
// descriptions, and the basic statistics helpers defined on them.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghostsim/errors.hpp"

namespace ghostsim {

/// Dense row-major 2-D array of doubles with a physical pixel pitch.
///
/// Objects and masks are square n-by-n grids; detector frames may be
/// rectangular (rows != cols).  Operations that require a square grid use
/// n(), which throws DimensionMismatch on a rectangular image.
class Image {
public:
    /// Empty 0x0 placeholder, used for not-yet-assigned result fields.
    Image() : rows_(0), cols_(0), pitch_mm_(0.0) {}

    /// Zero-filled image.  pitch_mm <= 0 selects the default pitch of
    /// 1/side mm for square images (and 1/cols mm otherwise).
    Image(int rows, int cols, double pitch_mm = 0.0);

    /// Convenience constructor for the common square case.
    static Image square(int n, double pitch_mm = 0.0) { return Image(n, n, pitch_mm); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    /// Side length of a square image; throws if the image is rectangular.
    int n() const;

    double pitch_mm() const { return pitch_mm_; }
    void set_pitch_mm(double pitch_mm);

    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    size_t size() const { return data_.size(); }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    int rows_;
    int cols_;
    double pitch_mm_;
    std::vector<double> data_;
};

/// First two population moments of an image: mean and population standard
/// deviation (divide-by-N convention) over all pixels.
struct ImageStats {
    double mu = 0.0;
    double sigma = 0.0;
};

ImageStats image_stats(const Image& img);

/// Root or derived seed of a deterministic random stream.  Streams are
/// identified by a human-readable label chain so independent parts of a
/// simulation never share draws.
struct Seed {
    uint64_t value = 0;
    std::string label;
};

/// Derive a child seed from `root` and a label.  Deterministic: the same
/// (root, label) pair always yields the same child, and distinct labels
/// yield statistically independent streams.
Seed derive_seed(const Seed& root, const std::string& label);

/// Derive a child seed from `root` and an integer stream index.  Used for
/// per-mask / per-measurement streams where labels would be wastefully slow.
Seed derive_seed(const Seed& root, uint64_t index);

/// Measurement noise description.
enum class NoiseKind {
    None,     ///< pass-through
    Poisson,  ///< photon shot noise at gain sigma_p
    Gaussian, ///< additive read noise of std sigma_m (photons)
    Both,     ///< Poisson followed by Gaussian
};

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double sigma_p = 1.0; ///< Poisson scaling: y = sigma_p^2 * Poisson(lambda / sigma_p^2)
    double sigma_m = 0.0; ///< Gaussian std in photons

    void validate() const;
};

const char* noise_kind_name(NoiseKind kind);

} // namespace ghostsim
