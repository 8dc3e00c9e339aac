#include "kdvnudge/attractor.hpp"

#include <cmath>

#include "kdvnudge/kernels.hpp"

namespace kdv {

namespace {

SpectralField steady_residual(const SpectralField& u, const ModelParams& p) {
    SpectralField r = 0.5 * dealias_product(u, u).derivative(1) + u.derivative(3);
    SpectralField damp = u;
    damp *= p.gamma;
    r += damp;
    r -= p.forcing;
    return r;
}

SpectralField jacobian_apply(const SpectralField& u, const SpectralField& h, const ModelParams& p) {
    SpectralField r = dealias_product(u, h).derivative(1) + h.derivative(3);
    SpectralField damp = h;
    damp *= p.gamma;
    r += damp;
    return r;
}

// (gamma + d_xxx)^{-1} applied mode-wise.
SpectralField diag_solve(const SpectralField& f, const ModelParams& p) {
    SpectralField out = f;
    auto c = out.coeffs();
    for (int k = 1; k < out.n_modes(); ++k) {
        const double kt = p.grid.wavenumber(k);
        c[k] /= cplx(p.gamma, -kt * kt * kt);
    }
    return out;
}

// GMRES on the diagonally preconditioned system M^{-1} J h = M^{-1} b.
SpectralField gmres_solve(const SpectralField& u, const SpectralField& b, const ModelParams& p,
                          double rel_tol, int max_kry) {
    const SpectralField pb = diag_solve(b, p);
    const double bnorm = pb.l2();
    if (bnorm == 0.0) return SpectralField::zeros(p.grid, b.mean_mode());

    std::vector<SpectralField> basis;
    basis.push_back((1.0 / bnorm) * pb);
    std::vector<std::vector<double>> H;  // H[j][i], Hessenberg column j
    std::vector<double> cs, sn, g{bnorm};

    for (int j = 0; j < max_kry; ++j) {
        SpectralField w = diag_solve(jacobian_apply(u, basis[j], p), p);
        H.emplace_back(j + 2, 0.0);
        for (int i = 0; i <= j; ++i) {
            H[j][i] = SpectralField::dot(w, basis[i]);
            w -= H[j][i] * basis[i];
        }
        H[j][j + 1] = w.l2();
        if (!std::isfinite(H[j][j + 1]))
            throw NonConvergenceError(H[j][j + 1], "steady state: singular linearization");
        if (H[j][j + 1] > 1e-14 * bnorm) basis.push_back((1.0 / H[j][j + 1]) * w);

        // Givens updates of the least-squares system.
        for (int i = 0; i < j; ++i) {
            const double t = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
            H[j][i + 1] = -sn[i] * H[j][i] + cs[i] * H[j][i + 1];
            H[j][i] = t;
        }
        const double denom = std::hypot(H[j][j], H[j][j + 1]);
        if (denom == 0.0) throw NonConvergenceError(0.0, "steady state: singular linearization");
        cs.push_back(H[j][j] / denom);
        sn.push_back(H[j][j + 1] / denom);
        H[j][j] = denom;
        H[j][j + 1] = 0.0;
        g.push_back(-sn[j] * g[j]);
        g[j] = cs[j] * g[j];

        if (std::abs(g[j + 1]) <= rel_tol * bnorm || j == max_kry - 1 ||
            static_cast<int>(basis.size()) == j + 1) {
            const int dim = j + 1;
            std::vector<double> y(dim, 0.0);
            for (int i = dim - 1; i >= 0; --i) {
                double s = g[i];
                for (int l = i + 1; l < dim; ++l) s -= H[l][i] * y[l];
                y[i] = s / H[i][i];
            }
            SpectralField x = SpectralField::zeros(p.grid, b.mean_mode());
            for (int i = 0; i < dim; ++i) x += y[i] * basis[i];
            return x;
        }
    }
    throw NonConvergenceError(0.0, "steady state: GMRES stalled");
}

}  // namespace

SteadyState solve_steady_state(const ModelParams& p, const SpectralField* guess, double tol,
                               int max_iter, double c_universal) {
    p.validate();
    if (!(p.gamma > 0)) throw std::invalid_argument("solve_steady_state: gamma must be positive");
    SteadyState out;
    SpectralField u = guess ? *guess : diag_solve(p.forcing, p);
    SpectralField F = steady_residual(u, p);
    double res = F.l2();
    int it = 0;
    for (; it < max_iter && res > tol; ++it) {
        SpectralField step = gmres_solve(u, -1.0 * F, p, 1e-3, 60);
        double lambda = 1.0;
        for (int bt = 0; bt < 12; ++bt) {
            SpectralField trial = u + lambda * step;
            SpectralField Ft = steady_residual(trial, p);
            const double rt = Ft.l2();
            if (rt < (1.0 - 1e-4 * lambda) * res || rt <= tol) {
                u = trial;
                F = Ft;
                res = rt;
                break;
            }
            lambda *= 0.5;
            if (bt == 11)
                throw NonConvergenceError(res, "solve_steady_state: line search failed");
        }
    }
    if (res > tol)
        throw NonConvergenceError(res, "solve_steady_state: no convergence after max iterations");
    out.u_star = u;
    out.residual_l2 = res;
    out.newton_iters = it;

    const double fl2 = p.forcing.l2();
    const double r0 = fl2 / p.gamma;
    out.l2_bound_slack = r0 - u.l2();
    out.l2_bound_ok = out.l2_bound_slack >= -1e-12 * std::max(1.0, r0);
    const double uxxx = u.derivative(3).l2();
    out.h3_lhs = uxxx * uxxx;
    out.h3_rhs = 2.0 * c_universal * std::pow(r0, 6) + 16.0 * fl2 * fl2;
    out.h3_bound_ok = out.h3_lhs <= out.h3_rhs;
    return out;
}

double verify_steady_by_flow(const SpectralField& u_star, const ModelParams& p, double T) {
    ModelParams q = p;
    q.mu = 0.0;
    q.m = 0;
    const TrajectoryWindow traj =
        integrate(u_star, 0.0, T, q, nullptr, std::llround(T / q.dt), false);
    return traj.state(traj.size() - 1).dist_h2(u_star);
}

WResult approximate_W(const TrajectoryWindow& v, const ModelParams& p, const WOptions& opt) {
    p.validate();
    if (!v.in_Hm() || v.band() > p.m)
        throw std::invalid_argument("approximate_W: control must live in H_m");
    const double ta = v.t_begin() + opt.spinup, tb = v.t_end();
    if (!(tb > ta))
        throw ConfigError("approximate_W: control window must cover the spin-up prefix");

    WResult out;
    out.rho_ok = opt.rho_proxy <= 0 || v.x_norm() < opt.rho_proxy;

    TrajectoryWindow runs[2];
    const std::uint64_t seeds[2] = {opt.seed1, opt.seed2};
    std::exception_ptr err;
    par::for_tasks(2, [&](std::size_t i) {
        try {
            const SpectralField w0 =
                seeded_field(p.grid, seeds[i], opt.init_modes, opt.init_h2, p.mean);
            // First leg: spin-up prefix, second leg: the recorded window.
            const int spin_steps = static_cast<int>(std::llround((ta - v.t_begin()) / p.dt));
            const TrajectoryWindow spin = integrate(w0, v.t_begin(), ta, p, &v, spin_steps, false);
            Recorder rec{p.grid.nyquist(), opt.sample_stride, false, {}};
            integrate_multi(spin.state(spin.size() - 1), ta, tb, p, &v,
                            std::span<Recorder>(&rec, 1));
            runs[i] = std::move(rec.out);
        } catch (...) {
            if (!err) err = std::current_exception();
        }
    });
    if (err) std::rethrow_exception(err);

    out.certificate = runs[0].max_h2_gap(runs[1]);
    if (!(out.certificate <= opt.tol))
        throw NonConvergenceError(out.certificate,
                                  "approximate_W: certificate above tolerance (mu, m too small "
                                  "for contraction at these parameters)");
    out.w = std::move(runs[0]);
    return out;
}

double dform_rhs_magnitude(const TrajectoryWindow& v, const ModelParams& p, const WOptions& opt,
                           double* certificate) {
    const WResult W = approximate_W(v, p, opt);
    if (certificate) *certificate = W.certificate;
    // |v - P_m W(v)|_X over the overlap of the two windows.
    double worst = 0;
    for (std::size_t i = 0; i < W.w.size(); ++i) {
        const double t = W.w.time(i);
        std::vector<cplx> vc(v.stride(), cplx{});
        v.eval(t, vc);
        const auto wc = W.w.sample(i);
        double acc = 0;
        for (int k = 1; k <= p.m; ++k) {
            const double kt = p.grid.wavenumber(k);
            const cplx diff = (k < v.stride() ? vc[k] : cplx{}) - wc[k];
            acc += 2.0 * kt * kt * kt * kt * std::norm(diff);
        }
        worst = std::max(worst, p.grid.L * acc);
    }
    return worst;
}

std::vector<DFormState> integrate_determining_form(const TrajectoryWindow& v0,
                                                   const ModelParams& p,
                                                   const SpectralField& u_star,
                                                   const DFormOptions& opt) {
    const TrajectoryWindow base = TrajectoryWindow::constant(
        u_star.project_low(std::max(p.m, 1)), v0.band(), v0.t_begin(), v0.t_end(),
        static_cast<int>(v0.size()));
    const TrajectoryWindow dir = TrajectoryWindow::affine(1.0, v0, -1.0, base);

    auto assemble = [&](double theta) { return TrajectoryWindow::affine(1.0, base, theta, dir); };
    auto rho_at = [&](double theta) {
        const TrajectoryWindow v = assemble(theta);
        // collinearity of the assembled input (exact by construction)
        const TrajectoryWindow resid = TrajectoryWindow::affine(
            1.0, TrajectoryWindow::affine(1.0, v, -1.0, base), -theta, dir);
        if (resid.x_norm() > 1e-10)
            throw std::logic_error("determining form: collinearity residual above 1e-10");
        return dform_rhs_magnitude(v, p, opt.w);
    };

    std::vector<DFormState> states;
    double theta = 1.0, tau = 0.0, dtau = opt.d_tau;
    double rho = rho_at(theta);
    states.push_back({tau, theta, rho});
    while (tau < opt.tau_end && theta > opt.theta_stop && rho > opt.rho_stop) {
        double trial_dtau = std::min(dtau, opt.tau_end - tau);
        double theta_next = 0, rho_next = 0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            theta_next = theta * std::exp(-rho * trial_dtau);
            rho_next = rho_at(theta_next);
            const double jump = std::abs(rho_next - rho);
            if (jump <= opt.max_rel_jump * std::max({rho, rho_next, 1e-30})) {
                accepted = true;
                break;
            }
            trial_dtau *= 0.5;
        }
        if (!accepted)
            throw NonConvergenceError(rho, "determining form: step halving exhausted");
        if (theta_next > theta + 1e-12)
            throw std::logic_error("determining form: theta increased");
        tau += trial_dtau;
        theta = theta_next;
        rho = rho_next;
        states.push_back({tau, theta, rho});
        if (trial_dtau == dtau) dtau *= 1.5;
        else dtau = trial_dtau;
    }
    return states;
}

}  // namespace kdv
