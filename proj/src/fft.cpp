#include "kdvnudge/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace kdv {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}

RealFft::RealFft(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("RealFft: size must be >= 2");
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    // FFTW_ESTIMATE keeps plan selection deterministic across runs.
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, static_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, static_cast<fftw_complex*>(spec_), real_, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("RealFft: plan creation failed");
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
    fftw_free(real_);
    fftw_free(spec_);
}

void RealFft::forward(std::span<const double> samples, std::span<cplx> coeffs) {
    if (static_cast<int>(samples.size()) != n_ || static_cast<int>(coeffs.size()) != n_ / 2 + 1)
        throw std::invalid_argument("RealFft::forward: size mismatch");
    for (int i = 0; i < n_; ++i) real_[i] = samples[i];
    fftw_execute(static_cast<fftw_plan>(fwd_));
    const double scale = 1.0 / n_;
    auto* s = static_cast<fftw_complex*>(spec_);
    for (int k = 0; k <= n_ / 2; ++k) coeffs[k] = cplx(s[k][0] * scale, s[k][1] * scale);
}

void RealFft::inverse(std::span<const cplx> coeffs, std::span<double> samples) {
    if (static_cast<int>(coeffs.size()) != n_ / 2 + 1 || static_cast<int>(samples.size()) != n_)
        throw std::invalid_argument("RealFft::inverse: size mismatch");
    auto* s = static_cast<fftw_complex*>(spec_);
    for (int k = 0; k <= n_ / 2; ++k) {
        s[k][0] = coeffs[k].real();
        s[k][1] = coeffs[k].imag();
    }
    fftw_execute(static_cast<fftw_plan>(inv_));
    for (int i = 0; i < n_; ++i) samples[i] = real_[i];
}

RealFft& fft_for(int n) {
    thread_local std::map<int, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFft>(n);
    return *slot;
}

}  // namespace kdv
