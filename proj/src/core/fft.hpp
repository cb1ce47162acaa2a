// SPDX-License-Identifier: Apache-2.0
//
// Internal FFTW wrapper: a reusable real-to-complex 2-D transform of fixed
// size.  Plans are created with FFTW_ESTIMATE only — FFTW_MEASURE selects
// algorithms by timing and would make reruns differ at the last ulp,
// breaking the byte-identical-output guarantee.

#pragma once

#include <complex>
#include <vector>

#include <fftw3.h>

namespace ghostsim::detail {

class FftWorkspace {
public:
    FftWorkspace(int rows, int cols);
    ~FftWorkspace();
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    /// Number of complex bins in the half spectrum: rows * (cols/2 + 1).
    int spectrum_size() const { return rows_ * (cols_ / 2 + 1); }

    /// Forward transform of a row-major rows*cols real array into the
    /// internal spectrum buffer.
    void forward(const double* in);

    /// Inverse transform of the internal spectrum buffer into `out`,
    /// normalized by 1/(rows*cols) so forward followed by inverse is the
    /// identity.  Destroys the spectrum buffer (c2r transforms do).
    void inverse(double* out);

    std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(cplx_); }
    const std::complex<double>* spectrum() const {
        return reinterpret_cast<const std::complex<double>*>(cplx_);
    }

private:
    int rows_;
    int cols_;
    double* real_;
    fftw_complex* cplx_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

} // namespace ghostsim::detail
