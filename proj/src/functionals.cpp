#include "kdvnudge/functionals.hpp"

#include <cmath>

#include "kdvnudge/kernels.hpp"

namespace kdv {

namespace {
constexpr int oversample = 2;

double quad_weight(const GridSpec& g) { return g.L / (oversample * g.N); }
}

double phi1(const SpectralField& w) {
    const auto u = w.samples(oversample);
    const auto ux = w.derivative(1).samples(oversample);
    const double s = par::sum(u.size(), [&](std::size_t i) {
        return ux[i] * ux[i] - u[i] * u[i] * u[i] / 3.0;
    });
    return quad_weight(w.grid()) * s;
}

double phi2(const SpectralField& w) {
    const auto u = w.samples(oversample);
    const auto ux = w.derivative(1).samples(oversample);
    const auto uxx = w.derivative(2).samples(oversample);
    const double s = par::sum(u.size(), [&](std::size_t i) {
        const double u2 = u[i] * u[i];
        return 1.8 * uxx[i] * uxx[i] - 3.0 * u[i] * ux[i] * ux[i] + 0.25 * u2 * u2;
    });
    return quad_weight(w.grid()) * s;
}

double psi(const SpectralField& delta, const SpectralField& xi) {
    if (!(delta.grid() == xi.grid())) throw std::invalid_argument("psi: grid mismatch");
    const auto d = delta.samples(oversample);
    const auto dx = delta.derivative(1).samples(oversample);
    const auto x = xi.samples(oversample);
    const double s = par::sum(d.size(), [&](std::size_t i) {
        return dx[i] * dx[i] - x[i] * d[i] * d[i];
    });
    return quad_weight(delta.grid()) * s;
}

double h1_from_phi1_slack(const SpectralField& w, double r0_proxy) {
    const double a = std::max(w.l2(), r0_proxy);
    const double h1 = w.h1();
    return 2.0 * phi1(w) + 2.0 * std::pow(a, 10.0 / 3.0) - h1 * h1;
}

double h2_from_phi2_slack(const SpectralField& w, double a, double b) {
    const double h2 = w.h2();
    return phi2(w) + 45.0 / 64.0 * a * a * a * b - h2 * h2;
}

double psi_lower_slack(const SpectralField& delta, const SpectralField& xi, double r_inf) {
    const double xi_inf = xi.linf();
    if (r_inf < xi_inf * (1.0 - 1e-12))
        throw std::invalid_argument("psi_lower_slack: r_inf below |xi|_inf");
    const double l2 = delta.l2(), h1 = delta.h1();
    return psi(delta, xi) + r_inf * l2 * l2 - h1 * h1;
}

FunctionalSample functional_sample(double t, const SpectralField& w, double a_max, double b_max,
                                   const SpectralField* delta, const SpectralField* xi,
                                   double r_inf) {
    FunctionalSample s;
    s.t = t;
    s.phi1 = phi1(w);
    s.phi2 = phi2(w);
    s.h1_bound_slack = h1_from_phi1_slack(w);
    s.h2_bound_slack = h2_from_phi2_slack(w, a_max, b_max);
    if (delta && xi) {
        s.psi = psi(*delta, *xi);
        s.psi_bound_slack = psi_lower_slack(*delta, *xi, r_inf);
    }
    return s;
}

BalanceResiduals energy_balance_residual(const TrajectoryWindow& traj, const ModelParams& p,
                                         const TrajectoryWindow* control) {
    if (traj.size() < 3) throw std::invalid_argument("energy_balance_residual: need >= 3 samples");
    const std::size_t n = traj.size();
    const double dt = traj.spacing();
    std::vector<double> l2sq(n), pmsq(n), h2sq(n), fw(n), vpw(n);
    std::vector<cplx> v(traj.stride());
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = traj.sample(i);
        double a = 0, b = 0, c = 0, d = 0, e = 0;
        for (int k = 1; k < traj.stride(); ++k) {
            const double kt = traj.grid().wavenumber(k);
            const double wgt = (k == traj.grid().nyquist()) ? 1.0 : 2.0;
            const double a2 = std::norm(s[k]);
            a += wgt * a2;
            c += wgt * kt * kt * kt * kt * a2;
            if (k <= p.m) b += wgt * a2;
            if (p.forcing.n_modes()) d += wgt * (p.forcing.coeff(k) * std::conj(s[k])).real();
        }
        if (control) {
            std::fill(v.begin(), v.end(), cplx{});
            control->eval(traj.time(i), std::span<cplx>(v.data(), control->stride()));
            const int top = std::min<int>(p.m, control->band());
            for (int k = 1; k <= top; ++k) e += 2.0 * (v[k] * std::conj(s[k])).real();
        }
        const double L = traj.grid().L;
        l2sq[i] = L * a;
        pmsq[i] = L * b;
        h2sq[i] = L * c;
        fw[i] = L * d;
        vpw[i] = L * e;
    }
    BalanceResiduals out;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ddt = (l2sq[i + 1] - l2sq[i - 1]) / (2.0 * dt);
        const double terms = 2.0 * p.gamma * l2sq[i] + 2.0 * p.mu * pmsq[i] +
                             2.0 * p.epsilon * h2sq[i] - 2.0 * fw[i] - 2.0 * p.mu * vpw[i];
        out.t.push_back(traj.time(i));
        out.residual.push_back(ddt + terms);
        out.scale = std::max({out.scale, std::abs(ddt), 2.0 * p.gamma * l2sq[i],
                              2.0 * p.mu * pmsq[i], 2.0 * std::abs(fw[i]),
                              2.0 * p.mu * std::abs(vpw[i])});
    }
    return out;
}

}  // namespace kdv
