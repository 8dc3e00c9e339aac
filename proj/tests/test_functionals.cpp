#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdvnudge/functionals.hpp"
#include "test_util.hpp"

using namespace kdv;
using namespace kdv::testing;

namespace {
const GridSpec g64 = GridSpec::make(2.0 * pi, 64);
const GridSpec g128 = GridSpec::make(2.0 * pi, 128);

SpectralField fn(const GridSpec& g, double (*f)(double)) {
    std::vector<double> u(g.N);
    for (int i = 0; i < g.N; ++i) u[i] = f(g.L * i / g.N);
    return SpectralField::from_samples(g, u);
}
}

TEST_CASE("phi1 closed forms") {
    CHECK(phi1(SpectralField::zeros(g64)) == 0.0);
    CHECK(rel_err(phi1(fn(g64, [](double x) { return std::sin(x); })), pi) < 1e-12);
    // cos x + cos 2x: integral w_x^2 = 5 pi, integral w^3 = 3 pi / 2
    const double want = 5.0 * pi - 0.5 * pi;
    CHECK(rel_err(phi1(fn(g64, [](double x) { return std::cos(x) + std::cos(2 * x); })), want) <
          1e-12);
}

TEST_CASE("phi2 closed forms and term decomposition under scaling") {
    CHECK(phi2(SpectralField::zeros(g64)) == 0.0);
    const double want = 9.0 * pi / 5.0 + 3.0 * pi / 16.0;
    CHECK(rel_err(phi2(fn(g64, [](double x) { return std::sin(x); })), want) < 1e-12);

    // phi2(2w) assembled from separately integrated pieces
    const SpectralField w = seeded_field(g128, 4, 15, 1.0);
    const auto u = w.samples(2);
    const auto ux = w.derivative(1).samples(2);
    const auto uxx = w.derivative(2).samples(2);
    double t_h2 = 0, t_cubic = 0, t_quartic = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        t_h2 += uxx[i] * uxx[i];
        t_cubic += u[i] * ux[i] * ux[i];
        t_quartic += u[i] * u[i] * u[i] * u[i];
    }
    const double h = g128.L / (2.0 * g128.N);
    t_h2 *= h;
    t_cubic *= h;
    t_quartic *= h;
    const double assembled = 4.0 * 1.8 * t_h2 - 8.0 * 3.0 * t_cubic + 16.0 * 0.25 * t_quartic;
    CHECK(rel_err(phi2(2.0 * w), assembled) < 1e-12);
}

TEST_CASE("psi closed forms") {
    const SpectralField z = SpectralField::zeros(g64);
    CHECK(psi(z, z) == 0.0);
    const SpectralField s = fn(g64, [](double x) { return std::sin(x); });
    CHECK(rel_err(psi(s, z), pi) < 1e-12);
    const SpectralField c = fn(g64, [](double x) { return std::cos(x); });
    CHECK(rel_err(psi(s, c), pi) < 1e-12);  // the cross-term integrates to zero
    CHECK_THROWS_AS(psi(s, SpectralField::zeros(g128)), std::invalid_argument);
}

TEST_CASE("h1_from_phi1_slack: closed form and randomized nonnegativity") {
    CHECK(h1_from_phi1_slack(SpectralField::zeros(g64)) == 0.0);
    const SpectralField s = fn(g64, [](double x) { return std::sin(x); });
    const double want = 2.0 * pi + 2.0 * std::pow(pi, 5.0 / 3.0) - pi;
    CHECK(rel_err(h1_from_phi1_slack(s), want) < 1e-12);
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const SpectralField w = seeded_field(g128, seed, 18, 0.3 + (seed % 11) * 0.4);
        CHECK(h1_from_phi1_slack(w) >= -1e-8);
    }
}

TEST_CASE("psi_lower_slack: equality case, closed form, randomized oracle") {
    const SpectralField s = fn(g64, [](double x) { return std::sin(x); });
    // xi = 0 makes the bound an identity
    CHECK(std::abs(psi_lower_slack(s, SpectralField::zeros(g64), 0.0)) < 1e-12);
    const SpectralField c = fn(g64, [](double x) { return std::cos(x); });
    CHECK(rel_err(psi_lower_slack(s, c, 1.0), pi) < 1e-10);
    CHECK_THROWS_AS(psi_lower_slack(s, c, 0.5), std::invalid_argument);  // r_inf below |xi|_inf
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        const SpectralField d = seeded_field(g128, 3 * seed, 16, 1.0);
        const SpectralField xi = seeded_field(g128, 3 * seed + 1, 16, 0.5 + (seed % 5));
        CHECK(psi_lower_slack(d, xi, xi.linf()) >= -1e-8);
    }
}

TEST_CASE("h2_from_phi2_slack nonnegative with trajectory-style maxima") {
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        const SpectralField w = seeded_field(g128, seed, 14, 0.5 + (seed % 7) * 0.5);
        CHECK(h2_from_phi2_slack(w, w.l2(), w.h1()) >= -1e-8);
    }
}

TEST_CASE("first variations match centered finite differences") {
    const double eps = 1e-6;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const SpectralField w = seeded_field(g128, 2 * seed, 12, 1.0);
        const SpectralField h = seeded_field(g128, 2 * seed + 1, 12, 1.0);

        // dPhi = integral (2 w_x h_x - w^2 h)
        const double dphi1 = SpectralField::dot(2.0 * w.derivative(1), h.derivative(1)) -
                             SpectralField::dot(dealias_product(w, w), h);
        const double fd1 = (phi1(w + eps * h) - phi1(w - eps * h)) / (2 * eps);
        CHECK(rel_err(fd1, dphi1) < 1e-6);

        // dphi2 = integral (18/5 w_xx h_xx - 3 h w_x^2 - 6 w w_x h_x + w^3 h)
        const SpectralField wx = w.derivative(1);
        const double dphi2 = SpectralField::dot(3.6 * w.derivative(2), h.derivative(2)) -
                             3.0 * SpectralField::dot(dealias_product(wx, wx), h) -
                             6.0 * SpectralField::dot(dealias_product(w, wx), h.derivative(1)) +
                             SpectralField::dot(dealias_product(dealias_product(w, w), w), h);
        const double fd2 = (phi2(w + eps * h) - phi2(w - eps * h)) / (2 * eps);
        CHECK(rel_err(fd2, dphi2) < 1e-6);

        // dPsi (xi frozen) = integral (2 d_x h_x - 2 xi d h)
        const SpectralField xi = seeded_field(g128, 1000 + seed, 12, 1.0);
        const double dpsi = 2.0 * SpectralField::dot(w.derivative(1), h.derivative(1)) -
                            2.0 * SpectralField::dot(dealias_product(xi, w), h);
        const double fdp = (psi(w + eps * h, xi) - psi(w - eps * h, xi)) / (2 * eps);
        CHECK(rel_err(fdp, dpsi) < 1e-6);
    }
}

TEST_CASE("energy balance residual: zero run, refinement order, error paths") {
    ModelParams p;
    p.grid = g128;
    p.gamma = 0.5;
    p.forcing = SpectralField::zeros(g128);
    p.dt = 1e-3;

    // w == 0 run gives identically zero residuals
    TrajectoryWindow zero_run(g128, MeanMode::EnforcedZero, g128.nyquist());
    zero_run.start(0.0, 0.1);
    for (int i = 0; i < 5; ++i) zero_run.push_back(SpectralField::zeros(g128));
    const auto rz = energy_balance_residual(zero_run, p, nullptr);
    for (double r : rz.residual) CHECK(r == 0.0);

    TrajectoryWindow two(g128, MeanMode::EnforcedZero, g128.nyquist());
    two.start(0.0, 0.1);
    two.push_back(SpectralField::zeros(g128));
    two.push_back(SpectralField::zeros(g128));
    CHECK_THROWS_AS(energy_balance_residual(two, p, nullptr), std::invalid_argument);

    // damped unforced run: centered-difference residual shrinks ~ (sample dt)^2
    const SpectralField u0 = seeded_field(g128, 21, 10, 1.0);
    auto max_resid = [&](int stride) {
        const TrajectoryWindow t = integrate(u0, 0.0, 1.0, p, nullptr, stride, false);
        const auto r = energy_balance_residual(t, p, nullptr);
        double m = 0;
        for (double v : r.residual) m = std::max(m, std::abs(v));
        return m;
    };
    const double r40 = max_resid(40), r10 = max_resid(10);
    CHECK(r40 / r10 > 8.0);   // order ~2 in the sampling interval
    CHECK(r40 / r10 < 32.0);
}
