#include "kdvnudge/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "kdvnudge/fft.hpp"
#include "kdvnudge/kernels.hpp"

namespace kdv {

SpectralField SpectralField::zeros(const GridSpec& g, MeanMode mean) {
    SpectralField f;
    f.grid_ = g;
    f.mean_ = mean;
    f.c_.assign(g.n_modes(), cplx{});
    return f;
}

SpectralField SpectralField::from_samples(const GridSpec& g, std::span<const double> samples,
                                          MeanMode mean) {
    if (static_cast<int>(samples.size()) != g.N)
        throw std::invalid_argument("from_samples: expected N samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw std::invalid_argument("from_samples: non-finite sample");
    SpectralField f = zeros(g, mean);
    fft_for(g.N).forward(samples, f.c_);
    f.enforce_mean_policy();
    return f;
}

SpectralField SpectralField::from_modes(const GridSpec& g, std::span<const ForcingMode> modes,
                                        MeanMode mean) {
    SpectralField f = zeros(g, mean);
    for (const auto& m : modes) {
        if (m.k < 1 || m.k > g.nyquist())
            throw std::invalid_argument("from_modes: mode index out of range");
        // a cos(k~x + p) = (a/2) e^{ip} e^{ik~x} + conj
        f.c_[m.k] += 0.5 * m.amplitude * std::polar(1.0, m.phase);
    }
    return f;
}

SpectralField SpectralField::from_coeffs(const GridSpec& g, std::vector<cplx> coeffs, MeanMode mean) {
    if (static_cast<int>(coeffs.size()) != g.n_modes())
        throw std::invalid_argument("from_coeffs: wrong spectrum length");
    SpectralField f;
    f.grid_ = g;
    f.mean_ = mean;
    f.c_ = std::move(coeffs);
    f.enforce_mean_policy();
    return f;
}

void SpectralField::enforce_mean_policy() {
    if (mean_ == MeanMode::EnforcedZero && !c_.empty()) c_[0] = cplx{};
    if (!c_.empty()) c_[0] = cplx(c_[0].real(), 0.0);  // real mean for a real field
}

cplx SpectralField::coeff(int k) const {
    const int a = std::abs(k);
    if (a >= n_modes()) return cplx{};
    return k >= 0 ? c_[a] : std::conj(c_[a]);
}

void SpectralField::set_coeff(int k, cplx v) {
    if (k < 0 || k >= n_modes()) throw std::invalid_argument("set_coeff: index out of range");
    c_[k] = v;
    enforce_mean_policy();
}

std::vector<double> SpectralField::samples(int oversample) const {
    if (oversample < 1) throw std::invalid_argument("samples: oversample >= 1");
    const int M = grid_.N * oversample;
    std::vector<cplx> padded(M / 2 + 1, cplx{});
    for (int k = 0; k < n_modes(); ++k) padded[k] = c_[k];
    std::vector<double> out(M);
    fft_for(M).inverse(padded, out);
    return out;
}

SpectralField SpectralField::derivative(int order) const {
    if (order < 0 || order > 4) throw std::invalid_argument("derivative: order must be in [0,4]");
    SpectralField out = *this;
    if (order == 0) return out;
    const int n = n_modes();
    par::for_each(n, [&](std::size_t k) {
        const cplx ik(0.0, grid_.wavenumber(static_cast<int>(k)));
        cplx w = 1.0;
        for (int j = 0; j < order; ++j) w *= ik;
        out.c_[k] = w * c_[k];
    });
    out.c_[0] = cplx{};
    // One-sided Nyquist has no well-defined odd derivative; fields in normal
    // use are band-limited below it.
    out.c_[n - 1] = cplx{};
    return out;
}

SpectralField SpectralField::project_low(int m) const {
    if (m < 1) throw std::invalid_argument("project_low: m >= 1");
    SpectralField out = *this;
    const int n = n_modes();
    for (int k = 0; k < n; ++k)
        if (k == 0 || k > m) out.c_[k] = cplx{};
    return out;
}

SpectralField SpectralField::project_high(int m) const {
    if (m < 1) throw std::invalid_argument("project_high: m >= 1");
    SpectralField out = *this;
    for (int k = 1; k <= std::min(m, n_modes() - 1); ++k) out.c_[k] = cplx{};
    return out;
}

namespace {
// Parseval weight: interior one-sided modes count twice, k=0 and Nyquist once.
inline double pweight(int k, int nyq) { return (k == 0 || k == nyq) ? 1.0 : 2.0; }
}

NormSet SpectralField::norms() const {
    NormSet s;
    const int n = n_modes(), nyq = grid_.nyquist();
    double l2s = 0, h1s = 0, h2s = 0, m1s = 0, m2s = 0;
    for (int k = 0; k < n; ++k) {
        const double a2 = std::norm(c_[k]);
        if (a2 == 0.0) continue;
        const double w = pweight(k, nyq), kt = grid_.wavenumber(k);
        l2s += w * a2;
        h1s += w * kt * kt * a2;
        h2s += w * kt * kt * kt * kt * a2;
        if (k > 0) {
            m1s += w * a2 / (kt * kt);
            m2s += w * a2 / (kt * kt * kt * kt);
        }
    }
    s.l2 = std::sqrt(grid_.L * l2s);
    s.h1 = std::sqrt(grid_.L * h1s);
    s.h2 = std::sqrt(grid_.L * h2s);
    s.hm1 = std::sqrt(grid_.L * m1s);
    s.hm2 = std::sqrt(grid_.L * m2s);
    s.linf = linf();
    return s;
}

double SpectralField::l2() const {
    const int nyq = grid_.nyquist();
    const double s = par::sum(n_modes(), [&](std::size_t k) {
        return pweight(static_cast<int>(k), nyq) * std::norm(c_[k]);
    });
    return std::sqrt(grid_.L * s);
}

double SpectralField::h1() const {
    const int nyq = grid_.nyquist();
    const double s = par::sum(n_modes(), [&](std::size_t k) {
        const double kt = grid_.wavenumber(static_cast<int>(k));
        return pweight(static_cast<int>(k), nyq) * kt * kt * std::norm(c_[k]);
    });
    return std::sqrt(grid_.L * s);
}

double SpectralField::h2() const {
    const int nyq = grid_.nyquist();
    const double s = par::sum(n_modes(), [&](std::size_t k) {
        const double kt = grid_.wavenumber(static_cast<int>(k));
        return pweight(static_cast<int>(k), nyq) * kt * kt * kt * kt * std::norm(c_[k]);
    });
    return std::sqrt(grid_.L * s);
}

double SpectralField::linf() const {
    // True sup-norm is approximated on a 4x oversampled grid; grid-point max
    // under-reports it.
    const auto u = samples(4);
    return par::max(u.size(), [&](std::size_t i) { return std::abs(u[i]); });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("field +=: grid mismatch");
    if (o.mean_ == MeanMode::Free) mean_ = MeanMode::Free;
    par::for_each(c_.size(), [&](std::size_t k) { c_[k] += o.c_[k]; });
    enforce_mean_policy();
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("field -=: grid mismatch");
    if (o.mean_ == MeanMode::Free) mean_ = MeanMode::Free;
    par::for_each(c_.size(), [&](std::size_t k) { c_[k] -= o.c_[k]; });
    enforce_mean_policy();
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    par::for_each(c_.size(), [&](std::size_t k) { c_[k] *= a; });
    return *this;
}

double SpectralField::dot(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid_ == b.grid_)) throw std::invalid_argument("dot: grid mismatch");
    const int nyq = a.grid_.nyquist();
    const double s = par::sum(a.c_.size(), [&](std::size_t k) {
        return pweight(static_cast<int>(k), nyq) * (a.c_[k] * std::conj(b.c_[k])).real();
    });
    return a.grid_.L * s;
}

double SpectralField::dist_l2(const SpectralField& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("dist_l2: grid mismatch");
    const int nyq = grid_.nyquist();
    const double s = par::sum(c_.size(), [&](std::size_t k) {
        return pweight(static_cast<int>(k), nyq) * std::norm(c_[k] - o.c_[k]);
    });
    return std::sqrt(grid_.L * s);
}

double SpectralField::dist_h2(const SpectralField& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("dist_h2: grid mismatch");
    const int nyq = grid_.nyquist();
    const double s = par::sum(c_.size(), [&](std::size_t k) {
        const double kt = grid_.wavenumber(static_cast<int>(k));
        return pweight(static_cast<int>(k), nyq) * kt * kt * kt * kt * std::norm(c_[k] - o.c_[k]);
    });
    return std::sqrt(grid_.L * s);
}

SpectralField dealias_product(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("dealias_product: grid mismatch");
    const GridSpec& g = a.grid();
    const auto ua = a.samples();
    const auto ub = b.samples();
    std::vector<double> prod(g.N);
    par::for_each(prod.size(), [&](std::size_t i) { prod[i] = ua[i] * ub[i]; });
    const MeanMode mean =
        (a.mean_mode() == MeanMode::Free || b.mean_mode() == MeanMode::Free) ? MeanMode::Free
                                                                             : MeanMode::EnforcedZero;
    SpectralField out = SpectralField::zeros(g, mean);
    fft_for(g.N).forward(prod, out.coeffs());
    auto c = out.coeffs();
    for (int k = g.dealias_cutoff + 1; k < g.n_modes(); ++k) c[k] = cplx{};
    out.enforce_mean_policy();
    return out;
}

namespace {
double unit_double(std::mt19937_64& rng) {
    // 53 random bits in [0,1); avoids distribution-implementation differences.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}

SpectralField seeded_field(const GridSpec& g, std::uint64_t seed, int modes, double h2_norm,
                           MeanMode mean) {
    if (modes < 1 || modes > g.dealias_cutoff)
        throw std::invalid_argument("seeded_field: modes must lie in [1, dealias_cutoff]");
    std::mt19937_64 rng(seed);
    SpectralField f = SpectralField::zeros(g, mean);
    for (int k = 1; k <= modes; ++k) {
        const double re = 2.0 * unit_double(rng) - 1.0;
        const double im = 2.0 * unit_double(rng) - 1.0;
        f.coeffs()[k] = cplx(re, im);
    }
    const double h2 = f.h2();
    if (h2 > 0.0 && h2_norm > 0.0) f *= h2_norm / h2;
    return f;
}

const char* generator_id() { return "mt19937_64/raw53 flat modes 1..K, H2-rescaled, v1"; }

void save_field(const SpectralField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    char buf[128];
    std::snprintf(buf, sizeof buf, "kdv-field v1 L %.17g N %d cutoff %d mean %s\n", f.grid().L,
                  f.grid().N, f.grid().dealias_cutoff,
                  f.mean_mode() == MeanMode::Free ? "free" : "zero");
    os << buf;
    if (f.mean_mode() == MeanMode::Free && f.coeff(0) != cplx{}) {
        std::snprintf(buf, sizeof buf, "0 %.17g %.17g\n", f.coeff(0).real(), 0.0);
        os << buf;
    }
    for (int k = 1; k < f.n_modes(); ++k) {
        const cplx c = f.coeff(k);
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", k, c.real(), c.imag());
        os << buf;
    }
    if (!os) throw std::runtime_error("save_field: write failed for " + path);
}

SpectralField load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_field: cannot open " + path);
    std::string tag, ver;
    double L = 0;
    int N = 0, cutoff = 0;
    std::string meanstr;
    std::string key;
    is >> tag >> ver;
    if (tag != "kdv-field" || ver != "v1") throw std::runtime_error("load_field: bad header");
    is >> key >> L >> key >> N >> key >> cutoff >> key >> meanstr;
    const MeanMode mean = meanstr == "free" ? MeanMode::Free : MeanMode::EnforcedZero;
    SpectralField f = SpectralField::zeros(GridSpec::make(L, N, cutoff), mean);
    int k;
    double re, im;
    while (is >> k >> re >> im) {
        if (k < 0 || k >= f.n_modes()) throw std::runtime_error("load_field: mode out of range");
        f.coeffs()[k] = cplx(re, im);
    }
    f.enforce_mean_policy();
    return f;
}

}  // namespace kdv
