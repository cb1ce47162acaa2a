// SPDX-License-Identifier: Apache-2.0

#include "fft.hpp"

#include <cstring>
#include <mutex>

#include "ghostsim/errors.hpp"

namespace ghostsim::detail {

namespace {
// The FFTW planner mutates global state; planning must be serialized.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

FftWorkspace::FftWorkspace(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw InvalidArgument("FftWorkspace: bad size");
    real_ = fftw_alloc_real(static_cast<size_t>(rows_) * cols_);
    cplx_ = fftw_alloc_complex(static_cast<size_t>(spectrum_size()));
    if (!real_ || !cplx_) {
        fftw_free(real_);
        fftw_free(cplx_);
        throw NumericError("FftWorkspace: allocation failed");
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(rows_, cols_, real_, cplx_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(rows_, cols_, cplx_, real_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) {
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(cplx_);
        throw NumericError("FftWorkspace: planning failed");
    }
}

FftWorkspace::~FftWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
}

void FftWorkspace::forward(const double* in) {
    std::memcpy(real_, in, sizeof(double) * static_cast<size_t>(rows_) * cols_);
    fftw_execute(fwd_);
}

void FftWorkspace::inverse(double* out) {
    fftw_execute(bwd_);
    const double scale = 1.0 / (static_cast<double>(rows_) * cols_);
    const size_t total = static_cast<size_t>(rows_) * cols_;
    for (size_t i = 0; i < total; ++i) out[i] = real_[i] * scale;
}

} // namespace ghostsim::detail
