#pragma once

#include <vector>

#include "kdvnudge/field.hpp"

namespace kdv {

// Uniformly sampled trajectory segment. States are stored band-limited to
// |k| <= band: band = N/2 holds full states (a Y-window), band = m holds
// P_m-projected observations (an X-window, i.e. states in H_m).
//
// The continuous X-norm is a sup over all time; on a window it is the max of
// the sampled H^2 norms, which is only a windowed approximation of it.
class TrajectoryWindow {
public:
    TrajectoryWindow() = default;
    TrajectoryWindow(const GridSpec& g, MeanMode mean, int band);

    // Constant-in-time window holding `field` on [t0, t1] with n >= 2 samples.
    static TrajectoryWindow constant(const SpectralField& field, int band, double t0, double t1,
                                     int n_samples);
    // c_a * a + c_b * b, sample by sample (grids, bands and time grids must match).
    static TrajectoryWindow affine(double c_a, const TrajectoryWindow& a, double c_b,
                                   const TrajectoryWindow& b);

    const GridSpec& grid() const { return grid_; }
    int band() const { return band_; }
    bool in_Hm() const { return band_ < grid_.nyquist(); }
    int stride() const { return band_ + 1; }

    std::size_t size() const { return n_; }
    double t_begin() const { return t0_; }
    double t_end() const { return n_ ? t0_ + spacing_ * (n_ - 1) : t0_; }
    double spacing() const { return spacing_; }
    double time(std::size_t i) const { return t0_ + spacing_ * i; }

    void start(double t0, double spacing, std::size_t expected = 0);
    void push_back(const SpectralField& f);
    void push_raw(std::span<const cplx> coeffs);  // exactly band+1 entries
    std::span<const cplx> sample(std::size_t i) const;
    std::span<cplx> sample(std::size_t i);
    SpectralField state(std::size_t i) const;

    bool covers(double a, double b) const;
    // Piecewise-linear interpolation; sample-aligned times return the stored
    // values exactly. Throws ConfigError outside the window.
    void eval(double t, std::span<cplx> out) const;

    double h2_of_sample(std::size_t i) const;
    double x_norm() const;  // max over samples of |.|_{H^2}
    double max_h2_gap(const TrajectoryWindow& other) const;

    std::vector<NormSet> norms;  // optional per-sample records (filled by integrate)

private:
    GridSpec grid_{};
    MeanMode mean_ = MeanMode::EnforcedZero;
    int band_ = 0;
    double t0_ = 0, spacing_ = 0;
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

}  // namespace kdv
