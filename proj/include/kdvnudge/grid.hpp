#pragma once

#include "kdvnudge/common.hpp"

namespace kdv {

// Uniform periodic grid on [0, L). Fields are stored as one-sided complex
// spectra for wavenumber indices k = 0..N/2; products are dealiased by the
// 2/3 rule at |k| > dealias_cutoff.
struct GridSpec {
    double L = 2.0 * pi;
    int N = 128;
    int dealias_cutoff = 42;

    static GridSpec make(double L, int N, int dealias_cutoff = -1) {
        if (!(L > 0.0)) throw std::invalid_argument("GridSpec: L must be positive");
        if (N < 8 || N % 2 != 0) throw std::invalid_argument("GridSpec: N must be even and >= 8");
        if (dealias_cutoff < 0) dealias_cutoff = N / 3;
        if (dealias_cutoff < 1 || dealias_cutoff > N / 2 - 1)
            throw std::invalid_argument("GridSpec: dealias_cutoff must lie in [1, N/2-1]");
        return GridSpec{L, N, dealias_cutoff};
    }

    int nyquist() const { return N / 2; }
    int n_modes() const { return N / 2 + 1; }
    double wavenumber(int k) const { return 2.0 * pi * static_cast<double>(k) / L; }
    double dx() const { return L / N; }

    bool operator==(const GridSpec&) const = default;
};

}  // namespace kdv
