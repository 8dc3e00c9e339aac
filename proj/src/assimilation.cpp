#include "kdvnudge/assimilation.hpp"

#include <cmath>

#include "kdvnudge/bounds.hpp"

namespace kdv {

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value,
                   double floor_guard) {
    if (t.size() != value.size() || t.size() < 3)
        throw std::invalid_argument("fit_decay: need matching t/value series");
    const std::size_t skip = t.size() / 10;  // initial transient
    std::vector<double> xs, ys;
    std::vector<double> floor_samples;
    for (std::size_t i = skip; i < t.size(); ++i) {
        if (value[i] < floor_guard) {
            floor_samples.push_back(value[i]);
            continue;
        }
        xs.push_back(t[i]);
        ys.push_back(std::log(value[i]));
    }
    if (xs.size() < 20) throw std::invalid_argument("fit_decay: fewer than 20 usable samples");
    DecayFit fit;
    fit.used = xs.size();
    fit.window[0] = xs.front();
    fit.window[1] = xs.back();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.rate = -sxy / sxx;
    fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    if (!floor_samples.empty()) {
        std::sort(floor_samples.begin(), floor_samples.end());
        fit.floor = floor_samples[floor_samples.size() / 2];
    } else {
        fit.floor = *std::min_element(value.begin(), value.end());
    }
    return fit;
}

namespace {

int psi_case(double psi_val, double scale) {
    const double tol = 1e-12 * std::max(1.0, scale);
    if (psi_val < -tol) return 1;
    if (psi_val > tol) return 2;
    return 3;  // within crossing tolerance of zero
}

ErrorSample make_sample(double t, const SpectralField& w, const SpectralField& u) {
    ErrorSample s;
    s.t = t;
    SpectralField d = w - u;
    s.dl2 = d.l2();
    s.dh1 = d.h1();
    s.dh2 = d.h2();
    SpectralField xi = w + u;
    xi *= 0.5;
    s.psi = psi(d, xi);
    s.sign_case = psi_case(s.psi, s.dh1 * s.dh1 + s.dl2 * s.dl2);
    return s;
}

}  // namespace

AssimilationResult run_assimilation(const AssimilationConfig& cfg) {
    const ModelParams& p = cfg.params;
    p.validate();
    if (!(cfg.horizon > 0)) throw std::invalid_argument("run_assimilation: horizon must be > 0");

    AssimilationResult out;
    const SpectralField u0 =
        seeded_field(p.grid, cfg.ref_seed, cfg.init_modes, cfg.init_h2, p.mean);
    const SpectralField w0 =
        seeded_field(p.grid, cfg.nudged_seed, cfg.init_modes, cfg.init_h2, p.mean);

    ModelParams ref = p;
    ref.mu = 0.0;
    ref.m = 0;

    if (cfg.coupled) {
        // Twin-step: reference and nudged advance in lock step; the nudged copy
        // sees P_m of the reference's stage values (continuous observation).
        EtdRk4 ref_stepper(ref);
        EtdRk4 nud_stepper(p);
        std::vector<cplx> u(u0.coeffs().begin(), u0.coeffs().end());
        for (int k = p.grid.dealias_cutoff + 1; k < p.grid.n_modes(); ++k) u[k] = cplx{};
        const long long spin_steps = std::llround(cfg.spinup / p.dt);
        for (long long s = 0; s < spin_steps; ++s) ref_stepper.step(u, s * p.dt, nullptr);
        std::vector<cplx> w = cfg.nudged_start_from_ref
                                  ? u
                                  : std::vector<cplx>(w0.coeffs().begin(), w0.coeffs().end());
        for (int k = p.grid.dealias_cutoff + 1; k < p.grid.n_modes(); ++k) w[k] = cplx{};
        const long long steps = std::llround(cfg.horizon / p.dt);
        if (steps % cfg.sample_stride)
            throw std::invalid_argument("run_assimilation: sample_stride must divide step count");
        out.ref = TrajectoryWindow(p.grid, p.mean, p.grid.nyquist());
        out.nudged = TrajectoryWindow(p.grid, p.mean, p.grid.nyquist());
        out.obs = TrajectoryWindow(p.grid, p.mean, p.m);
        const double t0 = cfg.spinup;
        out.ref.start(t0, cfg.sample_stride * p.dt);
        out.nudged.start(t0, cfg.sample_stride * p.dt);
        out.obs.start(t0, cfg.sample_stride * p.dt);
        auto rec = [&](long long s) {
            if (s % cfg.sample_stride) return;
            out.ref.push_raw({u.data(), u.size()});
            out.nudged.push_raw({w.data(), w.size()});
            out.obs.push_raw({u.data(), static_cast<std::size_t>(p.m + 1)});
        };
        rec(0);
        for (long long s = 0; s < steps; ++s) {
            nud_stepper.twin_step(u, w, t0 + s * p.dt, ref_stepper);
            for (const cplx& v : w)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw BlowUpError(t0 + (s + 1) * p.dt, "run_assimilation: non-finite state");
            rec(s + 1);
        }
    } else {
        // Reference runs at dt/2 so stored observations land on every nudged
        // stage time (stride 1); larger obs_stride spaces them out and the
        // nudged run falls back to linear interpolation in between.
        ref.dt = 0.5 * p.dt;
        SpectralField u_spin = u0;
        if (cfg.spinup > 0) {
            const TrajectoryWindow spin = integrate(u0, 0.0, cfg.spinup, ref, nullptr,
                                                    std::llround(cfg.spinup / ref.dt), false);
            u_spin = spin.state(spin.size() - 1);
        }

        std::array<Recorder, 2> recs{
            Recorder{p.m, cfg.obs_stride, false, {}},
            Recorder{p.grid.nyquist(), 2 * cfg.sample_stride, false, {}},
        };
        integrate_multi(u_spin, cfg.spinup, cfg.spinup + cfg.horizon, ref, nullptr, recs);
        out.obs = std::move(recs[0].out);
        out.ref = std::move(recs[1].out);

        Recorder nrec{p.grid.nyquist(), cfg.sample_stride, false, {}};
        integrate_multi(cfg.nudged_start_from_ref ? u_spin : w0, cfg.spinup,
                        cfg.spinup + cfg.horizon, p, &out.obs, std::span<Recorder>(&nrec, 1));
        out.nudged = std::move(nrec.out);
    }

    // Error series and Psi bookkeeping.
    for (std::size_t i = 0; i < out.nudged.size(); ++i) {
        const SpectralField w = out.nudged.state(i);
        const SpectralField u = out.ref.state(i);
        out.series.push_back(make_sample(out.nudged.time(i), w, u));
    }
    out.sup_pmu_h2 = out.obs.x_norm();
    if (!out.series.empty()) {
        const auto& first = out.series.front();
        const auto& last = out.series.back();
        const double envelope =
            std::exp(-p.gamma * (last.t - first.t)) * std::max(first.dl2, 1e-300);
        out.sync_ratio = last.dl2 / envelope;
    }
    std::vector<double> ts, vs;
    for (const auto& s : out.series) {
        ts.push_back(s.t);
        vs.push_back(s.dl2);
    }
    try {
        out.fit = fit_decay(ts, vs, cfg.floor_guard);
    } catch (const std::invalid_argument&) {
        out.fit.reset();
    }
    return out;
}

double delta_equation_residual(const AssimilationResult& r, const ModelParams& p, int step) {
    const std::size_t s = static_cast<std::size_t>(step);
    if (step < 1 || r.nudged.size() < 2 * s + 1)
        throw std::invalid_argument("delta_equation_residual: need >= 2*step+1 samples");
    const double dt = r.nudged.spacing() * step;
    double worst = 0;
    for (std::size_t i = s; i + s < r.nudged.size(); ++i) {
        const SpectralField wm = r.nudged.state(i - s), wp = r.nudged.state(i + s);
        const SpectralField um = r.ref.state(i - s), up = r.ref.state(i + s);
        const SpectralField w = r.nudged.state(i), u = r.ref.state(i);
        SpectralField d = w - u;
        SpectralField xi = w + u;
        xi *= 0.5;
        SpectralField ddot = (wp - up) - (wm - um);
        ddot *= 1.0 / (2.0 * dt);
        SpectralField res = ddot + dealias_product(xi, d).derivative(1) + d.derivative(3);
        SpectralField damp = d;
        damp *= p.gamma;
        res += damp;
        SpectralField nudge = d.project_low(std::max(p.m, 1));
        nudge *= p.mu;
        res += nudge;  // v = P_m u exactly at sample times, so mu(v - P_m u) = 0
        const double scale = std::max(1e-300, d.h2() * (p.gamma + p.mu + 1.0));
        worst = std::max(worst, res.l2() / scale);
    }
    return worst;
}

double kdv_residual(const TrajectoryWindow& traj, const ModelParams& p) {
    if (traj.size() < 3) throw std::invalid_argument("kdv_residual: need >= 3 samples");
    const double dt = traj.spacing();
    double worst = 0;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const SpectralField u = traj.state(i);
        SpectralField udot = traj.state(i + 1) - traj.state(i - 1);
        udot *= 1.0 / (2.0 * dt);
        SpectralField res = udot + 0.5 * dealias_product(u, u).derivative(1) + u.derivative(3);
        SpectralField damp = u;
        damp *= p.gamma;
        res += damp;
        if (p.forcing.n_modes()) res -= p.forcing;
        const double scale = std::max(1.0, u.h2() * (1.0 + p.gamma));
        worst = std::max(worst, res.l2() / scale);
    }
    return worst;
}

ProbeReport determining_modes_probe(const ProbeConfig& cfg) {
    const ModelParams& p = cfg.params;
    p.validate();
    ProbeReport rep;
    rep.m = p.m;

    AssimilationConfig run;
    run.params = p;
    run.ref_seed = cfg.seed_a;
    run.nudged_seed = cfg.seed_b;
    run.init_modes = cfg.init_modes;
    run.init_h2 = cfg.init_h2;
    run.spinup = cfg.spinup;
    run.horizon = cfg.horizon;
    run.sample_stride = cfg.sample_stride;
    const AssimilationResult r = run_assimilation(run);

    const SpectralField w = r.nudged.state(r.nudged.size() - 1);
    const SpectralField u = r.ref.state(r.ref.size() - 1);
    SpectralField d = w - u;
    rep.terminal_dl2 = d.l2();
    rep.terminal_q_dl2 = p.m >= 1 ? d.project_high(p.m).l2() : rep.terminal_dl2;
    rep.sync_ratio = r.sync_ratio;

    bounds::BoundInputs bi;
    bi.gamma = p.gamma;
    bi.L = p.grid.L;
    bi.mu = p.mu;
    bi.rho = cfg.rho_proxy;
    if (p.forcing.n_modes()) {
        bi.f_l2 = p.forcing.l2();
        bi.f_linf = p.forcing.linf();
        bi.f_h2 = p.forcing.h2();
    }
    const auto table = bounds::check_conditions(bounds::compute_bounds(bi), bi, std::max(p.m, 1));
    rep.cond4p_pass = table.cond4p.pass;
    rep.cond4p_lhs = table.cond4p.lhs;
    return rep;
}

}  // namespace kdv
