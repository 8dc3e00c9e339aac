#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "kdvnudge/dispatch.hpp"
#include "kdvnudge/functionals.hpp"

namespace kdv {

namespace {

struct Check {
    const char* name;
    std::function<bool()> run;
};

SpectralField random_field(const GridSpec& g, std::uint64_t seed) {
    return seeded_field(g, seed, std::min(10, g.dealias_cutoff), 1.0 + (seed % 7) * 0.3);
}

}  // namespace

int selftest(bool verbose) {
    const GridSpec g = GridSpec::make(2.0 * pi, 128);
    std::vector<Check> checks;

    checks.push_back({"spectral: parseval", [&] {
        for (int s = 1; s <= 50; ++s) {
            const SpectralField u = random_field(g, s);
            const auto samples = u.samples();
            double quad = 0;
            for (double v : samples) quad += v * v;
            quad *= g.dx();
            const double l2 = u.l2();
            if (std::abs(quad - l2 * l2) > 1e-10 * std::max(1.0, l2 * l2)) return false;
        }
        return true;
    }});
    checks.push_back({"spectral: agmon", [&] {
        for (int s = 1; s <= 1000; ++s) {
            const SpectralField u = random_field(g, s);
            const double linf = u.linf();
            if (linf * linf > u.l2() * u.h1() * (1.0 + 1e-8)) return false;
        }
        return true;
    }});
    checks.push_back({"spectral: projection algebra", [&] {
        for (int s = 1; s <= 50; ++s) {
            const SpectralField u = random_field(g, s);
            const int m = 1 + static_cast<int>(s % 12);
            const SpectralField p = u.project_low(m), q = u.project_high(m);
            if ((p + q).dist_l2(u) > 1e-14) return false;
            if (p.project_low(m).dist_l2(p) > 0) return false;
            const double sum2 = p.l2() * p.l2() + q.l2() * q.l2();
            if (std::abs(sum2 - u.l2() * u.l2()) > 1e-10 * std::max(1.0, sum2)) return false;
            if (q.l2() > g.L / (2.0 * pi * (m + 1)) * q.h1() * (1.0 + 1e-12)) return false;
        }
        return true;
    }});
    checks.push_back({"functionals: hoca2 and eqn4 slacks", [&] {
        for (int s = 1; s <= 500; ++s) {
            const SpectralField w = random_field(g, 2 * s);
            if (h1_from_phi1_slack(w) < -1e-8) return false;
            const SpectralField xi = random_field(g, 2 * s + 1);
            if (psi_lower_slack(w, xi, xi.linf()) < -1e-8) return false;
        }
        return true;
    }});
    checks.push_back({"integrator: exact damping law", [&] {
        ModelParams p;
        p.grid = g;
        p.gamma = 0.5;
        p.mu = 0;
        p.m = 0;
        p.dt = 1e-3;
        p.forcing = SpectralField::zeros(g);
        const SpectralField u0 = seeded_field(g, 11, 8, 1.0);
        const TrajectoryWindow t = integrate(u0, 0.0, 2.0, p, nullptr, 2000, false);
        const double expect = std::exp(-0.5 * 2.0) * u0.l2();
        return std::abs(t.state(t.size() - 1).l2() - expect) < 1e-8 * u0.l2();
    }});
    checks.push_back({"bounds: minimal_m bisection == linear scan", [&] {
        std::mt19937_64 rng(7);
        auto u01 = [&] { return (rng() >> 11) * 0x1.0p-53; };
        for (int trial = 0; trial < 100; ++trial) {
            bounds::BoundInputs in;
            in.gamma = 0.2 + 2.0 * u01();
            in.mu = 1e3 * (1.0 + 9.0 * u01());
            in.rho = 0.5 + 4.0 * u01();
            in.f_l2 = in.f_linf = in.f_h2 = 0.1 + u01();
            std::vector<bounds::Cond> conds{bounds::Cond::c1, bounds::Cond::c2};
            std::int64_t mm;
            try {
                mm = bounds::minimal_m(in, conds);
            } catch (const InfeasibleError&) {
                continue;
            }
            if (mm > 20000) continue;
            const auto rep = bounds::compute_bounds(in);
            std::int64_t scan = 1;
            while (true) {
                const auto t = bounds::check_conditions(rep, in, scan);
                if (t.cond1.pass && t.cond2.pass) break;
                ++scan;
            }
            if (scan != mm) return false;
        }
        return true;
    }});
    checks.push_back({"assimilation: synthetic decay fit", [&] {
        std::vector<double> t, v;
        for (int i = 0; i <= 400; ++i) {
            t.push_back(0.1 * i);
            v.push_back(std::exp(-0.25 * 0.1 * i));
        }
        const DecayFit f = fit_decay(t, v, 1e-11);
        return std::abs(f.rate - 0.25) < 1e-10;
    }});
    checks.push_back({"config: round trip", [&] {
        const RunConfig a = RunConfig::defaults();
        return RunConfig::parse(a.serialize()) == a;
    }});

    int failures = 0;
    for (const auto& c : checks) {
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            if (verbose) std::printf("[FAIL] %s (exception: %s)\n", c.name, e.what());
            ++failures;
            continue;
        }
        if (verbose) std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", c.name);
        if (!ok) ++failures;
    }
    if (verbose) std::printf("selftest: %d/%zu checks passed\n",
                             static_cast<int>(checks.size()) - failures, checks.size());
    return failures;
}

}  // namespace kdv
