// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/core.hpp"

#include <cmath>

namespace ghostsim {

namespace {

// FNV-1a 64-bit hash; used instead of std::hash because its result must be
// stable across toolchains.
uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Final mixer of splitmix64; full-period bijection with good avalanche.
uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

Image::Image(int rows, int cols, double pitch_mm)
    : rows_(rows), cols_(cols), pitch_mm_(pitch_mm) {
    if (rows < 2 || cols < 2)
        throw InvalidArgument("Image: each side must be at least 2 pixels, got " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    if (pitch_mm_ <= 0.0) pitch_mm_ = 1.0 / cols_;
    if (!std::isfinite(pitch_mm_) || pitch_mm_ <= 0.0)
        throw InvalidArgument("Image: pixel pitch must be positive and finite");
    data_.assign(static_cast<size_t>(rows_) * cols_, 0.0);
}

int Image::n() const {
    if (!is_square())
        throw DimensionMismatch("Image: operation requires a square image, got " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
    return rows_;
}

void Image::set_pitch_mm(double pitch_mm) {
    if (!std::isfinite(pitch_mm) || pitch_mm <= 0.0)
        throw InvalidArgument("Image: pixel pitch must be positive and finite");
    pitch_mm_ = pitch_mm;
}

ImageStats image_stats(const Image& img) {
    const auto& v = img.data();
    const double inv_n = 1.0 / static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mu = sum * inv_n;
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mu;
        ss += d * d;
    }
    return ImageStats{mu, std::sqrt(ss * inv_n)};
}

Seed derive_seed(const Seed& root, const std::string& label) {
    Seed child;
    child.value = mix64(root.value ^ fnv1a(label));
    child.label = root.label.empty() ? label : root.label + "/" + label;
    return child;
}

Seed derive_seed(const Seed& root, uint64_t index) {
    Seed child;
    child.value = mix64(root.value ^ mix64(index + 1));
    child.label = root.label + "/#" + std::to_string(index);
    return child;
}

void NoiseSpec::validate() const {
    if (!std::isfinite(sigma_p) || sigma_p <= 0.0)
        throw InvalidArgument("NoiseSpec: sigma_p must be positive and finite");
    if (!std::isfinite(sigma_m) || sigma_m < 0.0)
        throw InvalidArgument("NoiseSpec: sigma_m must be non-negative and finite");
}

const char* noise_kind_name(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::None: return "none";
        case NoiseKind::Poisson: return "poisson";
        case NoiseKind::Gaussian: return "gaussian";
        case NoiseKind::Both: return "both";
    }
    return "?";
}

} // namespace ghostsim
