#include "kdvnudge/window.hpp"

#include <cmath>

namespace kdv {

TrajectoryWindow::TrajectoryWindow(const GridSpec& g, MeanMode mean, int band)
    : grid_(g), mean_(mean), band_(band) {
    if (band_ < 0 || band_ > g.nyquist())
        throw std::invalid_argument("TrajectoryWindow: band out of range");
}

TrajectoryWindow TrajectoryWindow::constant(const SpectralField& field, int band, double t0,
                                            double t1, int n_samples) {
    if (n_samples < 2 || !(t1 > t0))
        throw std::invalid_argument("TrajectoryWindow::constant: need t1 > t0 and >= 2 samples");
    TrajectoryWindow w(field.grid(), field.mean_mode(), band);
    w.start(t0, (t1 - t0) / (n_samples - 1), n_samples);
    for (int i = 0; i < n_samples; ++i) w.push_back(field);
    return w;
}

TrajectoryWindow TrajectoryWindow::affine(double c_a, const TrajectoryWindow& a, double c_b,
                                          const TrajectoryWindow& b) {
    if (!(a.grid_ == b.grid_) || a.band_ != b.band_ || a.n_ != b.n_ ||
        std::abs(a.t0_ - b.t0_) > 1e-12 || std::abs(a.spacing_ - b.spacing_) > 1e-12)
        throw std::invalid_argument("TrajectoryWindow::affine: windows not aligned");
    TrajectoryWindow out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i)
        out.data_[i] = c_a * a.data_[i] + c_b * b.data_[i];
    return out;
}

void TrajectoryWindow::start(double t0, double spacing, std::size_t expected) {
    if (!(spacing > 0)) throw std::invalid_argument("TrajectoryWindow::start: spacing must be > 0");
    t0_ = t0;
    spacing_ = spacing;
    n_ = 0;
    data_.clear();
    norms.clear();
    if (expected) data_.reserve(expected * stride());
}

void TrajectoryWindow::push_back(const SpectralField& f) {
    if (!(f.grid() == grid_)) throw std::invalid_argument("TrajectoryWindow: grid mismatch");
    const auto c = f.coeffs();
    data_.insert(data_.end(), c.begin(), c.begin() + stride());
    ++n_;
}

void TrajectoryWindow::push_raw(std::span<const cplx> coeffs) {
    if (static_cast<int>(coeffs.size()) != stride())
        throw std::invalid_argument("TrajectoryWindow::push_raw: wrong length");
    data_.insert(data_.end(), coeffs.begin(), coeffs.end());
    ++n_;
}

std::span<const cplx> TrajectoryWindow::sample(std::size_t i) const {
    return {data_.data() + i * stride(), static_cast<std::size_t>(stride())};
}

std::span<cplx> TrajectoryWindow::sample(std::size_t i) {
    return {data_.data() + i * stride(), static_cast<std::size_t>(stride())};
}

SpectralField TrajectoryWindow::state(std::size_t i) const {
    std::vector<cplx> c(grid_.n_modes(), cplx{});
    const auto s = sample(i);
    std::copy(s.begin(), s.end(), c.begin());
    return SpectralField::from_coeffs(grid_, std::move(c), mean_);
}

bool TrajectoryWindow::covers(double a, double b) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(b));
    return n_ >= 2 && t_begin() <= a + tol && t_end() >= b - tol;
}

void TrajectoryWindow::eval(double t, std::span<cplx> out) const {
    if (n_ < 2) throw ConfigError("control window has fewer than 2 samples");
    const double x = (t - t0_) / spacing_;
    const double tol = 1e-9 / spacing_ * std::max(1.0, std::abs(t));
    if (x < -tol || x > n_ - 1 + tol) throw ConfigError("control window does not cover requested time");
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9 && r >= 0 && r <= n_ - 1) {
        const auto s = sample(static_cast<std::size_t>(r));
        std::copy(s.begin(), s.end(), out.begin());
        return;
    }
    const std::size_t i = static_cast<std::size_t>(std::min<double>(std::max(0.0, std::floor(x)),
                                                                    static_cast<double>(n_ - 2)));
    const double th = x - i;
    const auto s0 = sample(i), s1 = sample(i + 1);
    for (int j = 0; j < stride(); ++j) out[j] = (1.0 - th) * s0[j] + th * s1[j];
}

double TrajectoryWindow::h2_of_sample(std::size_t i) const {
    const auto s = sample(i);
    double acc = 0;
    for (int k = 1; k < stride(); ++k) {
        const double kt = grid_.wavenumber(k);
        const double w = (k == grid_.nyquist()) ? 1.0 : 2.0;
        acc += w * kt * kt * kt * kt * std::norm(s[k]);
    }
    return std::sqrt(grid_.L * acc);
}

double TrajectoryWindow::x_norm() const {
    double m = 0;
    for (std::size_t i = 0; i < n_; ++i) m = std::max(m, h2_of_sample(i));
    return m;
}

double TrajectoryWindow::max_h2_gap(const TrajectoryWindow& other) const {
    if (n_ != other.n_ || band_ != other.band_ || !(grid_ == other.grid_))
        throw std::invalid_argument("max_h2_gap: windows not aligned");
    double m = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        const auto a = sample(i), b = other.sample(i);
        double acc = 0;
        for (int k = 1; k < stride(); ++k) {
            const double kt = grid_.wavenumber(k);
            const double w = (k == grid_.nyquist()) ? 1.0 : 2.0;
            acc += w * kt * kt * kt * kt * std::norm(a[k] - b[k]);
        }
        m = std::max(m, std::sqrt(grid_.L * acc));
    }
    return m;
}

}  // namespace kdv
