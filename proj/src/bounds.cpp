#include "kdvnudge/bounds.hpp"

#include <cmath>

namespace kdv::bounds {

void BoundInputs::validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("bounds: gamma must be positive");
    if (!(L > 0)) throw std::invalid_argument("bounds: L must be positive");
    if (!(mu >= 0)) throw std::invalid_argument("bounds: mu must be nonnegative");
    if (!(rho > 0)) throw std::invalid_argument("bounds: rho must be positive");
    if (!(alpha >= 1.0) || alpha >= 2.0)
        throw std::invalid_argument("bounds: alpha must lie in [1, 2)");
    if (!(beta > 0)) throw std::invalid_argument("bounds: beta must be positive");
    if (!(epsilon >= 0) || epsilon >= 1.0)
        throw std::invalid_argument("bounds: epsilon must lie in [0, 1)");
    if (!(f_l2 >= 0) || !(f_linf >= 0) || !(f_h2 >= 0))
        throw std::invalid_argument("bounds: forcing norms must be nonnegative");
    if (!(c_universal > 0)) throw std::invalid_argument("bounds: c must be positive");
}

namespace {

struct Chain {
    double r0t, r1tt, r0, r1t, c1t, c2t, r2t, r1, c1, c2, r2, rinf, rpt, rp, c3;
};

Chain run_chain(const BoundInputs& in) {
    const double g = in.gamma, mu = in.mu, rho = in.rho, eps = in.epsilon, c = in.c_universal;
    const double f2 = in.f_l2, finf = in.f_linf, fh2 = in.f_h2;
    Chain o{};

    o.r0t = (f2 + std::sqrt(g) * std::sqrt(mu) * rho) / g;

    const double r0t_103 = std::pow(o.r0t, 10.0 / 3.0);
    o.r1tt = std::sqrt(2.0 * (std::pow(g + mu, 4.0 / 3.0) + std::pow(g, 4.0 / 3.0)) /
                           std::pow(g, 4.0 / 3.0) * r0t_103 +
                       (2.0 / g) * ((finf + mu * rho) * o.r0t * o.r0t +
                                    2.0 * (fh2 + mu * rho) * o.r0t + c * eps * std::pow(o.r0t, 6)));

    o.r0 = f2 / g + rho + std::pow(mu, (in.alpha - 1.0) / 2.0);

    const double r0_103 = std::pow(o.r0, 10.0 / 3.0);
    o.r1t = std::sqrt((2.0 / g) *
                      ((std::pow(g + mu, 4.0 / 3.0) / std::pow(g, 1.0 / 3.0) + g) * r0_103 +
                       (finf + mu * rho) * o.r0 * o.r0 + 2.0 * (fh2 + mu * rho) * o.r0 +
                       c * eps * std::pow(o.r0t, 6)));

    auto C1 = [&](double r1x) {
        return 3.0 * g * std::pow(o.r0, 1.5) * std::sqrt(r1x) + 3.0 * (finf + mu * rho) * o.r0 +
               4.5 * mu * std::pow(o.r0, 1.5) * std::sqrt(r1x) + 3.6 * (fh2 + mu * rho) +
               6.0 * (fh2 + mu * rho) * o.r0;
    };
    auto C2 = [&](double r1x) {
        return 1.5 * std::pow(o.r0, 1.5) * std::sqrt(r1x) * (fh2 + mu * rho) +
               (fh2 + mu * rho) * std::pow(o.r0, 2.5) * std::sqrt(r1x) +
               mu * o.r0 * o.r0 * o.r0 * r1x;
    };
    auto R2 = [&](double c1x, double c2x, double r1x) {
        return std::sqrt(5.0 / (36.0 * g * g) * c1x * c1x + c2x / g +
                         eps * c * std::pow(o.r0, 22.0 / 3.0) / g +
                         45.0 / 64.0 * o.r0 * o.r0 * o.r0 * r1x);
    };

    o.c1t = C1(o.r1t);
    o.c2t = C2(o.r1t);
    o.r2t = R2(o.c1t, o.c2t, o.r1t);

    o.r1 = std::sqrt((2.0 / (g + mu)) *
                     ((std::pow(g + mu, 4.0 / 3.0) / std::pow(g, 1.0 / 3.0) + (g + mu)) * r0_103 +
                      (fh2 + mu * rho) * o.r0 * o.r0 + 2.0 * (fh2 + mu * rho) * o.r0 +
                      c * eps * std::pow(o.r0, 6) + std::pow(mu, in.beta)));

    o.c1 = C1(o.r1);
    o.c2 = C2(o.r1);
    o.r2 = R2(o.c1, o.c2, o.r1);

    o.rinf = std::sqrt(o.r0) * std::sqrt(o.r1);
    o.rpt = o.r2 + 0.5 * o.r0 * o.r0 + o.r1 + (g + mu) * o.r0 + f2 + mu * rho;
    o.rp = 0.5 * std::pow(o.r0, 1.5) * std::sqrt(o.r1) + o.r2 + (g + mu) * o.r0 + f2 + mu * rho;
    o.c3 = std::sqrt(o.r1) * std::sqrt(o.r2);
    return o;
}

}  // namespace

BoundReport compute_bounds(const BoundInputs& in) {
    in.validate();
    const Chain a = run_chain(in);
    BoundInputs z = in;
    z.mu = 0.0;
    const Chain b = run_chain(z);
    BoundReport r;
    r.r0_tilde = a.r0t;
    r.r1_tildetilde = a.r1tt;
    r.r0 = a.r0;
    r.r1_tilde = a.r1t;
    r.c1_tilde = a.c1t;
    r.c2_tilde = a.c2t;
    r.r2_tilde = a.r2t;
    r.r1 = a.r1;
    r.c1 = a.c1;
    r.c2 = a.c2;
    r.r2 = a.r2;
    r.r_inf = a.rinf;
    r.r_prime_tilde = a.rpt;
    r.r_prime = a.rp;
    r.c3 = a.c3;
    r.r0_0 = b.r0;
    r.r1_0 = b.r1;
    r.r2_0 = b.r2;
    r.r_inf_0 = b.rinf;
    r.r_prime_0 = b.rp;
    r.c3_0 = b.c3;
    return r;
}

const ConditionEntry& ConditionTable::get(Cond c) const {
    switch (c) {
        case Cond::c1: return cond1;
        case Cond::c2: return cond2;
        case Cond::c3: return cond3;
        case Cond::c4: return cond4;
        case Cond::c3p: return cond3p;
        case Cond::c5: return cond5;
        case Cond::c6: return cond6;
        case Cond::c4p: return cond4p;
    }
    throw std::logic_error("ConditionTable::get");
}

namespace {

ConditionEntry entry(double lhs, double rhs) { return {lhs, rhs, lhs <= rhs}; }

ConditionEntry eval_condition(const BoundReport& r, const BoundInputs& in, Cond c, double m) {
    const double g = in.gamma, mu = in.mu, L = in.L;
    const double mp1sq = (m + 1.0) * (m + 1.0);
    const double pi2 = pi * pi;
    switch (c) {
        case Cond::c1:
            return entry(mu * L * L * r.r1_tildetilde * r.r1_tildetilde / (2.0 * pi2 * mp1sq),
                         std::pow(mu, in.alpha));
        case Cond::c2:
            return entry(mu * L * L * r.r2_tilde * r.r2_tilde / (4.0 * pi2 * mp1sq),
                         std::pow(mu, in.beta));
        case Cond::c3:
            return entry(r.c3, 2.0 * mu);
        case Cond::c4:
            return entry(r.c3 * L * L / (8.0 * pi2 * mp1sq) / (g * g) *
                             ((2.0 * g + 2.0 * mu) * r.r_inf +
                              2.0 * std::pow(r.r_prime, 4) / (g * g * g)),
                         0.5);
        case Cond::c3p:
            return entry(r.c3_0, mu);
        case Cond::c5:
            return entry(r.c3_0 * L * L / (4.0 * pi2 * mp1sq), g / (2.0 * m));
        case Cond::c6:
            return entry((1.0 / m) * ((g + 2.0 * mu) * r.r_inf +
                                      2.0 * std::pow(r.r_prime, 4) / (g * g * g)),
                         g / 2.0);
        case Cond::c4p:
            return entry(L * L / (4.0 * pi2 * mp1sq) / g *
                             (2.0 * g * r.r_inf_0 +
                              2.0 * std::pow(r.r_prime_0, 4) / (g * g * g)),
                         0.5);
    }
    throw std::logic_error("eval_condition");
}

bool m_independent(Cond c) { return c == Cond::c3 || c == Cond::c3p; }

}  // namespace

ConditionTable check_conditions(const BoundReport& r, const BoundInputs& in, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("check_conditions: m >= 1");
    ConditionTable t;
    t.m = m;
    const double md = static_cast<double>(m);
    t.cond1 = eval_condition(r, in, Cond::c1, md);
    t.cond2 = eval_condition(r, in, Cond::c2, md);
    t.cond3 = eval_condition(r, in, Cond::c3, md);
    t.cond4 = eval_condition(r, in, Cond::c4, md);
    t.cond3p = eval_condition(r, in, Cond::c3p, md);
    t.cond5 = eval_condition(r, in, Cond::c5, md);
    t.cond6 = eval_condition(r, in, Cond::c6, md);
    t.cond4p = eval_condition(r, in, Cond::c4p, md);
    return t;
}

namespace {

bool all_hold(const BoundReport& r, const BoundInputs& in, const std::vector<Cond>& which,
              double m) {
    for (Cond c : which) {
        const auto e = eval_condition(r, in, c, m);
        if (!e.pass) return false;
    }
    return true;
}

void require_feasible(const BoundReport& r, const BoundInputs& in, const std::vector<Cond>& which) {
    for (Cond c : which) {
        if (!m_independent(c)) continue;
        const auto e = eval_condition(r, in, c, 1.0);
        if (!e.pass)
            throw InfeasibleError(
                "minimal_m: an m-independent condition fails (mu too small); no m helps");
    }
}

}  // namespace

std::int64_t minimal_m(const BoundInputs& in, const std::vector<Cond>& which) {
    in.validate();
    const BoundReport r = compute_bounds(in);
    require_feasible(r, in, which);
    constexpr std::int64_t m_cap = std::int64_t(1) << 62;
    std::int64_t hi = 1;
    while (!all_hold(r, in, which, static_cast<double>(hi))) {
        if (hi >= m_cap)
            throw InfeasibleError("minimal_m: threshold exceeds the representable mode range");
        hi *= 2;
    }
    std::int64_t lo = hi / 2;  // lo fails (or hi == 1)
    while (hi - lo > 1 && lo >= 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (all_hold(r, in, which, static_cast<double>(mid)))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double minimal_m_real(const BoundInputs& in, const std::vector<Cond>& which) {
    in.validate();
    const BoundReport r = compute_bounds(in);
    require_feasible(r, in, which);
    double worst = 1.0;
    for (Cond c : which) {
        if (m_independent(c)) continue;
        if (eval_condition(r, in, c, 1.0).pass) continue;
        double lo = 1.0, hi = 2.0;
        while (!eval_condition(r, in, c, hi).pass) {
            hi *= 4.0;
            if (hi > 1e60) throw InfeasibleError("minimal_m_real: no crossing below 1e60");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (eval_condition(r, in, c, mid).pass)
                hi = mid;
            else
                lo = mid;
        }
        worst = std::max(worst, hi);
    }
    return worst;
}

ScalingFit scaling_exponent(const BoundInputs& tmpl, const std::vector<double>& grid,
                            SweepTarget target, const std::vector<Cond>& which) {
    if (grid.size() < 3) throw std::invalid_argument("scaling_exponent: need >= 3 grid points");
    double lo = grid.front(), hi = grid.front();
    for (double v : grid) {
        if (!(v > 0)) throw std::invalid_argument("scaling_exponent: grid values must be positive");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi / lo < 1e3 * (1.0 - 1e-12))
        throw std::invalid_argument("scaling_exponent: grid must span at least 3 decades");

    ScalingFit fit;
    for (double v : grid) {
        BoundInputs in = tmpl;
        switch (target) {
            case SweepTarget::mu: in.mu = v; break;
            case SweepTarget::gamma: in.gamma = v; break;
            case SweepTarget::f_h2: {
                // scale the whole forcing: all three norms move together
                const double s = v / tmpl.f_h2;
                in.f_h2 = v;
                in.f_l2 = tmpl.f_l2 * s;
                in.f_linf = tmpl.f_linf * s;
                break;
            }
        }
        fit.param.push_back(v);
        fit.m.push_back(minimal_m_real(in, which));
    }
    const std::size_t n = fit.param.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(fit.param[i]);
        my += std::log(fit.m[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(fit.param[i]) - mx;
        sxy += dx * (std::log(fit.m[i]) - my);
        sxx += dx * dx;
    }
    fit.exponent = sxy / sxx;
    return fit;
}

double lipschitz_constant(const BoundReport& r, const BoundInputs& in, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("lipschitz_constant: m >= 1");
    const double md = static_cast<double>(m);
    const double pref = 4.0 * pi * pi * md * md / (in.L * in.L);
    const double inner = r.c3 * in.L * in.L /
                             (2.0 * pi * pi * in.gamma * (md + 1.0) * (md + 1.0)) *
                             (in.mu + in.mu * r.r_inf) +
                         2.0 * in.mu / in.gamma;
    return pref * inner;
}

RhoFixedPoint rho_fixed_point(BoundInputs in, int max_iter, double rel_tol) {
    in.mu = 0.0;
    RhoFixedPoint out;
    double rho = in.rho;
    out.history.push_back(rho);
    for (int i = 0; i < max_iter; ++i) {
        in.rho = rho;
        const double next = 4.0 * compute_bounds(in).r2_0;
        out.history.push_back(next);
        if (!std::isfinite(next) || next > 1e100) return out;  // diverged
        if (std::abs(next - rho) <= rel_tol * std::max(1.0, std::abs(next))) {
            out.converged = true;
            out.rho = next;
            return out;
        }
        rho = next;
    }
    return out;
}

}  // namespace kdv::bounds
