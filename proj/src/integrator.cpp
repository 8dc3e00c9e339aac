#include "kdvnudge/integrator.hpp"

#include <cmath>

#include "kdvnudge/fft.hpp"
#include "kdvnudge/kernels.hpp"

namespace kdv {

void ModelParams::validate() const {
    if (!(gamma >= 0) || !(mu >= 0) || !(dt > 0))
        throw std::invalid_argument("ModelParams: gamma, mu >= 0 and dt > 0 required");
    if (!(epsilon >= 0) || epsilon >= 1.0)
        throw std::invalid_argument("ModelParams: epsilon must lie in [0,1)");
    if (m < 0 || m > grid.nyquist())
        throw std::invalid_argument("ModelParams: m must lie in [0, N/2]");
    if (forcing.n_modes() && !(forcing.grid() == grid))
        throw std::invalid_argument("ModelParams: forcing grid mismatch");
    if (forcing.n_modes() && std::abs(forcing.coeff(0)) != 0.0)
        throw std::invalid_argument("ModelParams: forcing must have zero mean");
}

LinearSymbol LinearSymbol::of(const ModelParams& p) {
    LinearSymbol s;
    s.lambda.resize(p.grid.n_modes());
    for (int k = 0; k < p.grid.n_modes(); ++k) {
        const double kt = p.grid.wavenumber(k);
        double re = -p.gamma - p.epsilon * kt * kt * kt * kt;
        if (!p.explicit_nudging && k >= 1 && k <= p.m) re -= p.mu;
        s.lambda[k] = cplx(re, kt * kt * kt);
    }
    return s;
}

SpectralField nonlinear_rhs(const SpectralField& w, const ModelParams& p,
                            const SpectralField* v_now) {
    if (v_now) {
        double high = 0, scale = 0;
        for (int k = 1; k < v_now->n_modes(); ++k) {
            const double a = std::abs(v_now->coeff(k));
            scale = std::max(scale, a);
            if (k > p.m) high = std::max(high, a);
        }
        if (high > 1e-12 * std::max(scale, 1e-300))
            throw std::invalid_argument("nonlinear_rhs: control not in H_m");
    }
    SpectralField out = p.disable_nonlinearity
                            ? SpectralField::zeros(w.grid(), w.mean_mode())
                            : -0.5 * dealias_product(w, w).derivative(1);
    if (p.forcing.n_modes()) out += p.forcing;
    if (v_now && p.mu != 0.0) {
        SpectralField vterm = *v_now;
        vterm *= p.mu;
        out += vterm;
    }
    out.coeffs()[0] = cplx{};
    return out;
}

namespace {

// Contour quadrature of the ETDRK4 weights (mean of the analytic expression
// over a unit circle around each z = lambda*dt).
void contour_weights(const std::vector<cplx>& lambda, double h, std::vector<cplx>& E,
                     std::vector<cplx>& E2, std::vector<cplx>& Q, std::vector<cplx>& f1,
                     std::vector<cplx>& f2, std::vector<cplx>& f3) {
    const int n = static_cast<int>(lambda.size());
    const int M = EtdRk4::contour_points();
    E.resize(n);
    E2.resize(n);
    Q.assign(n, cplx{});
    f1.assign(n, cplx{});
    f2.assign(n, cplx{});
    f3.assign(n, cplx{});
    std::vector<cplx> ring(M);
    for (int j = 0; j < M; ++j) ring[j] = std::polar(1.0, 2.0 * pi * (j + 0.5) / M);
    for (int k = 0; k < n; ++k) {
        const cplx z0 = lambda[k] * h;
        E[k] = std::exp(z0);
        E2[k] = std::exp(0.5 * z0);
        cplx q{}, a{}, b{}, c{};
        for (int j = 0; j < M; ++j) {
            const cplx z = z0 + ring[j];
            const cplx ez = std::exp(z), z2 = z * z, z3 = z2 * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            a += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
            b += (2.0 + z + ez * (-2.0 + z)) / z3;
            c += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
        }
        Q[k] = h * q / static_cast<double>(M);
        f1[k] = h * a / static_cast<double>(M);
        f2[k] = h * b / static_cast<double>(M);
        f3[k] = h * c / static_cast<double>(M);
    }
}

}  // namespace

EtdRk4::EtdRk4(const ModelParams& p) : p_(p) {
    p_.validate();
    const auto sym = LinearSymbol::of(p_);
    contour_weights(sym.lambda, p_.dt, E_, E2_, Q_, f1_, f2_, f3_);
    const int n = p_.grid.n_modes();
    nu_.resize(n);
    na_.resize(n);
    nb_.resize(n);
    nc_.resize(n);
    a_.resize(n);
    b_.resize(n);
    cc_.resize(n);
    vbuf_.assign(n, cplx{});
    phys_.resize(p_.grid.N);
    prod_.resize(p_.grid.N);
}

// out = -1/2 d_x dealias(c*c) + f_hat + mu * v (+ explicit feedback -mu P_m c).
void EtdRk4::stage_rhs(const std::vector<cplx>& c, double t, const TrajectoryWindow* control,
                       std::vector<cplx>& out) {
    const std::vector<cplx>* obs = nullptr;
    if (control && p_.mu != 0.0) {
        std::fill(vbuf_.begin(), vbuf_.end(), cplx{});
        control->eval(t, std::span<cplx>(vbuf_.data(), control->stride()));
        vbuf_[0] = cplx{};
        obs = &vbuf_;
    }
    stage_rhs_obs(c, obs, out);
}

void EtdRk4::stage_rhs_obs(const std::vector<cplx>& c, const std::vector<cplx>* obs,
                           std::vector<cplx>& out) {
    const int n = p_.grid.n_modes();
    if (p_.disable_nonlinearity) {
        std::fill(out.begin(), out.end(), cplx{});
    } else {
        auto& fft = fft_for(p_.grid.N);
        fft.inverse(c, phys_);
        par::for_each(phys_.size(), [&](std::size_t i) { prod_[i] = phys_[i] * phys_[i]; });
        fft.forward(prod_, out);
        const int cut = p_.grid.dealias_cutoff;
        for (int k = cut + 1; k < n; ++k) out[k] = cplx{};
        for (int k = 0; k <= cut; ++k) {
            const cplx ik(0.0, p_.grid.wavenumber(k));
            out[k] *= -0.5 * ik;
        }
    }
    if (p_.forcing.n_modes()) {
        const auto f = p_.forcing.coeffs();
        for (int k = 0; k < n; ++k) out[k] += f[k];
    }
    if (obs) {
        for (int k = 1; k <= p_.m; ++k) out[k] += p_.mu * (*obs)[k];
        if (p_.explicit_nudging)
            for (int k = 1; k <= p_.m; ++k) out[k] -= p_.mu * c[k];
    }
    out[0] = cplx{};
}

void EtdRk4::step(std::vector<cplx>& c, double t, const TrajectoryWindow* control) {
    const int n = p_.grid.n_modes();
    const double h = p_.dt;
    stage_rhs(c, t, control, nu_);
    par::for_each(n, [&](std::size_t k) { a_[k] = E2_[k] * c[k] + Q_[k] * nu_[k]; });
    stage_rhs(a_, t + 0.5 * h, control, na_);
    par::for_each(n, [&](std::size_t k) { b_[k] = E2_[k] * c[k] + Q_[k] * na_[k]; });
    stage_rhs(b_, t + 0.5 * h, control, nb_);
    par::for_each(n, [&](std::size_t k) { cc_[k] = E2_[k] * a_[k] + Q_[k] * (2.0 * nb_[k] - nu_[k]); });
    stage_rhs(cc_, t + h, control, nc_);
    par::for_each(n, [&](std::size_t k) {
        c[k] = E_[k] * c[k] + f1_[k] * nu_[k] + 2.0 * f2_[k] * (na_[k] + nb_[k]) + f3_[k] * nc_[k];
    });
    if (p_.mean == MeanMode::EnforcedZero) c[0] = cplx{};
}

void EtdRk4::twin_step(std::vector<cplx>& u, std::vector<cplx>& w, double t, const EtdRk4& ref) {
    // One ETDRK4 step of the coupled system (u' = F(u), w' = F(w) - mu(P_m w - P_m u)).
    (void)t;
    const int n = p_.grid.n_modes();
    auto& r = const_cast<EtdRk4&>(ref);
    auto feed = [&](const std::vector<cplx>& ws, const std::vector<cplx>& us,
                    std::vector<cplx>& out) {
        stage_rhs_obs(ws, nullptr, out);
        if (p_.explicit_nudging) {
            // fused difference keeps identically-equal twins identical bitwise
            for (int k = 1; k <= p_.m; ++k) out[k] += p_.mu * (us[k] - ws[k]);
        } else {
            for (int k = 1; k <= p_.m; ++k) out[k] += p_.mu * us[k];
        }
    };
    // u stages (reference integrator) and w stages advance in lock step.
    r.stage_rhs_obs(u, nullptr, r.nu_);
    feed(w, u, nu_);
    par::for_each(n, [&](std::size_t k) {
        r.a_[k] = r.E2_[k] * u[k] + r.Q_[k] * r.nu_[k];
        a_[k] = E2_[k] * w[k] + Q_[k] * nu_[k];
    });
    r.stage_rhs_obs(r.a_, nullptr, r.na_);
    feed(a_, r.a_, na_);
    par::for_each(n, [&](std::size_t k) {
        r.b_[k] = r.E2_[k] * u[k] + r.Q_[k] * r.na_[k];
        b_[k] = E2_[k] * w[k] + Q_[k] * na_[k];
    });
    r.stage_rhs_obs(r.b_, nullptr, r.nb_);
    feed(b_, r.b_, nb_);
    par::for_each(n, [&](std::size_t k) {
        r.cc_[k] = r.E2_[k] * r.a_[k] + r.Q_[k] * (2.0 * r.nb_[k] - r.nu_[k]);
        cc_[k] = E2_[k] * a_[k] + Q_[k] * (2.0 * nb_[k] - nu_[k]);
    });
    r.stage_rhs_obs(r.cc_, nullptr, r.nc_);
    feed(cc_, r.cc_, nc_);
    par::for_each(n, [&](std::size_t k) {
        u[k] = r.E_[k] * u[k] + r.f1_[k] * r.nu_[k] + 2.0 * r.f2_[k] * (r.na_[k] + r.nb_[k]) +
               r.f3_[k] * r.nc_[k];
        w[k] = E_[k] * w[k] + f1_[k] * nu_[k] + 2.0 * f2_[k] * (na_[k] + nb_[k]) + f3_[k] * nc_[k];
    });
    if (p_.mean == MeanMode::EnforcedZero) u[0] = w[0] = cplx{};
}

namespace {

double h2_of_coeffs(const GridSpec& g, const std::vector<cplx>& c) {
    double acc = 0;
    for (int k = 1; k < g.n_modes(); ++k) {
        const double kt = g.wavenumber(k);
        const double w = (k == g.nyquist()) ? 1.0 : 2.0;
        acc += w * kt * kt * kt * kt * std::norm(c[k]);
    }
    return std::sqrt(g.L * acc);
}

}  // namespace

void integrate_multi(const SpectralField& w0, double t0, double t1, const ModelParams& p,
                     const TrajectoryWindow* control, std::span<Recorder> recorders) {
    p.validate();
    if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
    const double steps_real = (t1 - t0) / p.dt;
    const long long steps = std::llround(steps_real);
    if (steps < 1 || std::abs(steps_real - steps) > 1e-6)
        throw std::invalid_argument("integrate: (t1-t0) must be an integer number of dt steps");
    if (control && !control->covers(t0, t1))
        throw ConfigError("integrate: control window does not cover [t0, t1]");
    if (!(w0.grid() == p.grid)) throw std::invalid_argument("integrate: state grid mismatch");

    EtdRk4 stepper(p);
    std::vector<cplx> c(w0.coeffs().begin(), w0.coeffs().end());
    for (int k = p.grid.dealias_cutoff + 1; k < p.grid.n_modes(); ++k) c[k] = cplx{};
    if (p.mean == MeanMode::EnforcedZero) c[0] = cplx{};

    auto record = [&](long long step) {
        for (auto& r : recorders) {
            if (step % r.stride) continue;
            r.out.push_raw({c.data(), static_cast<std::size_t>(r.band + 1)});
            if (r.record_norms)
                r.out.norms.push_back(
                    SpectralField::from_coeffs(p.grid, std::vector<cplx>(c.begin(), c.end()), p.mean)
                        .norms());
        }
    };

    for (auto& r : recorders) {
        if (r.stride < 1 || steps % r.stride)
            throw std::invalid_argument("integrate: recorder stride must divide the step count");
        r.out = TrajectoryWindow(p.grid, p.mean, r.band);
        r.out.start(t0, r.stride * p.dt, static_cast<std::size_t>(steps / r.stride) + 1);
    }
    record(0);

    for (long long s = 0; s < steps; ++s) {
        const double t = t0 + s * p.dt;
        stepper.step(c, t, control);
        bool finite = true;
        for (const cplx& v : c)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                finite = false;
                break;
            }
        if (!finite) throw BlowUpError(t + p.dt, "integrate: non-finite state");
        if (h2_of_coeffs(p.grid, c) > p.blowup_guard)
            throw BlowUpError(t + p.dt, "integrate: H^2 norm exceeded blow-up guard");
        record(s + 1);
    }
}

TrajectoryWindow integrate(const SpectralField& w0, double t0, double t1, const ModelParams& p,
                           const TrajectoryWindow* control, int sample_every, bool record_norms) {
    Recorder rec{p.grid.nyquist(), sample_every, record_norms, {}};
    integrate_multi(w0, t0, t1, p, control, std::span<Recorder>(&rec, 1));
    return std::move(rec.out);
}

}  // namespace kdv
