#pragma once

#include <span>
#include <vector>

#include "kdvnudge/common.hpp"

namespace kdv {

// Real<->complex FFT pair of a fixed size, FFTW-backed. Coefficients follow
// the analytic convention: forward output is u_hat_k = (1/N) sum_j u_j e^{-i 2pi jk/N}
// for k = 0..N/2, and inverse reconstructs samples from those coefficients.
// Each instance owns its plans and buffers; plan creation is serialized
// internally, so distinct instances are safe to use from distinct threads.
class RealFft {
public:
    explicit RealFft(int n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    int size() const { return n_; }
    void forward(std::span<const double> samples, std::span<cplx> coeffs);
    void inverse(std::span<const cplx> coeffs, std::span<double> samples);

private:
    int n_;
    double* real_ = nullptr;
    void* spec_ = nullptr;   // fftw_complex*
    void* fwd_ = nullptr;    // fftw_plan
    void* inv_ = nullptr;
};

// Per-thread FFT cache keyed by size.
RealFft& fft_for(int n);

}  // namespace kdv
