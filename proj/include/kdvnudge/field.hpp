#pragma once

#include <span>
#include <vector>

#include "kdvnudge/grid.hpp"

namespace kdv {

enum class MeanMode {
    EnforcedZero,  // coefficient k=0 pinned to zero (the default phase space)
    Free,          // k=0 carried along; used only for validation runs
};

struct NormSet {
    double l2 = 0, h1 = 0, h2 = 0, hm1 = 0, hm2 = 0, linf = 0;
};

struct ForcingMode {
    int k = 1;
    double amplitude = 0;
    double phase = 0;  // contributes amplitude * cos(2 pi k x / L + phase)
};

// Real periodic function stored as the one-sided complex spectrum
// coeff(k), k = 0..N/2; coeff(-k) = conj(coeff(k)) is implicit. Immutable in
// normal use: operations return new fields.
class SpectralField {
public:
    SpectralField() = default;

    static SpectralField zeros(const GridSpec& g, MeanMode mean = MeanMode::EnforcedZero);
    static SpectralField from_samples(const GridSpec& g, std::span<const double> samples,
                                      MeanMode mean = MeanMode::EnforcedZero);
    static SpectralField from_modes(const GridSpec& g, std::span<const ForcingMode> modes,
                                    MeanMode mean = MeanMode::EnforcedZero);
    static SpectralField from_coeffs(const GridSpec& g, std::vector<cplx> coeffs, MeanMode mean);

    const GridSpec& grid() const { return grid_; }
    MeanMode mean_mode() const { return mean_; }
    int n_modes() const { return static_cast<int>(c_.size()); }
    std::span<const cplx> coeffs() const { return c_; }
    std::span<cplx> coeffs() { return c_; }

    // Signed-index access; negative k returns the conjugate.
    cplx coeff(int k) const;
    void set_coeff(int k, cplx v);  // k >= 0

    std::vector<double> samples(int oversample = 1) const;

    SpectralField derivative(int order) const;
    SpectralField project_low(int m) const;   // P_m: keep 0 < |k| <= m
    SpectralField project_high(int m) const;  // Q_m = I - P_m

    NormSet norms() const;
    double l2() const;
    double h1() const;
    double h2() const;
    double linf() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

    static double dot(const SpectralField& a, const SpectralField& b);  // integral of a*b
    double dist_l2(const SpectralField& o) const;
    double dist_h2(const SpectralField& o) const;

    void enforce_mean_policy();

private:
    GridSpec grid_{};
    MeanMode mean_ = MeanMode::EnforcedZero;
    std::vector<cplx> c_;
};

// Pointwise physical product with 2/3-rule truncation. Exact for inputs whose
// combined bandwidth stays representable on the N grid.
SpectralField dealias_product(const SpectralField& a, const SpectralField& b);

// Seeded band-limited pseudorandom field on modes 1..K, rescaled to the given
// H^2 norm. Fully deterministic: raw mt19937_64 draws mapped to doubles.
SpectralField seeded_field(const GridSpec& g, std::uint64_t seed, int modes, double h2_norm,
                           MeanMode mean = MeanMode::EnforcedZero);
const char* generator_id();

// Text serialization: grid header plus (k, re, im) triples for k > 0
// (and a k=0 record when a free-mean field carries one).
void save_field(const SpectralField& f, const std::string& path);
SpectralField load_field(const std::string& path);

}  // namespace kdv
