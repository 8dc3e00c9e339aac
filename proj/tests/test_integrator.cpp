#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdvnudge/functionals.hpp"
#include "test_util.hpp"

using namespace kdv;
using namespace kdv::testing;

namespace {
const GridSpec g128 = GridSpec::make(2.0 * pi, 128);

SpectralField fn(const GridSpec& g, double (*f)(double)) {
    std::vector<double> u(g.N);
    for (int i = 0; i < g.N; ++i) u[i] = f(g.L * i / g.N);
    return SpectralField::from_samples(g, u);
}

ModelParams base_params() {
    ModelParams p;
    p.grid = g128;
    p.gamma = 0.5;
    p.mu = 0.0;
    p.m = 0;
    p.dt = 1e-3;
    p.forcing = SpectralField::zeros(g128);
    return p;
}
}

TEST_CASE("linear symbol: damping floor and nudging block") {
    ModelParams p = base_params();
    p.mu = 7.0;
    p.m = 5;
    p.epsilon = 0.01;
    const auto s = LinearSymbol::of(p);
    for (int k = 1; k < p.grid.n_modes(); ++k) {
        CHECK(s.lambda[k].real() <= -p.gamma);
        const double kt = p.grid.wavenumber(k);
        const double want_re = -p.gamma - (k <= 5 ? 7.0 : 0.0) - 0.01 * kt * kt * kt * kt;
        CHECK(std::abs(s.lambda[k].real() - want_re) < 1e-12 * std::max(1.0, std::abs(want_re)));
        CHECK(std::abs(s.lambda[k].imag() - kt * kt * kt) < 1e-9 * std::max(1.0, kt * kt * kt));
    }
}

TEST_CASE("nonlinear_rhs: zero, symbolic oracle, control linearity, H_m check") {
    ModelParams p = base_params();
    CHECK(nonlinear_rhs(SpectralField::zeros(g128), p, nullptr).l2() == 0.0);

    const SpectralField s = fn(g128, [](double x) { return std::sin(x); });
    const SpectralField want = -0.5 * fn(g128, [](double x) { return std::sin(2 * x); });
    CHECK(nonlinear_rhs(s, p, nullptr).dist_l2(want) < 1e-13);

    p.forcing = fn(g128, [](double x) { return std::cos(x); });
    p.mu = 2.0;
    p.m = 4;
    const SpectralField v = 0.5 * fn(g128, [](double x) { return std::sin(x); });
    const SpectralField got = nonlinear_rhs(SpectralField::zeros(g128), p, &v);
    const SpectralField expect = fn(g128, [](double x) { return std::cos(x) + std::sin(x); });
    CHECK(got.dist_l2(expect) < 1e-13);

    const SpectralField bad = fn(g128, [](double x) { return std::sin(6 * x); });  // outside H_4
    CHECK_THROWS_AS(nonlinear_rhs(SpectralField::zeros(g128), p, &bad), std::invalid_argument);
}

TEST_CASE("step: exact linear propagation") {
    ModelParams p = base_params();
    p.disable_nonlinearity = true;
    p.gamma = 0.7;
    EtdRk4 st(p);
    const SpectralField u0 = fn(g128, [](double x) { return std::sin(x); });
    std::vector<cplx> c(u0.coeffs().begin(), u0.coeffs().end());
    st.step(c, 0.0, nullptr);
    // single-mode decay is exact up to the exp call itself
    CHECK(std::abs(c[1] - u0.coeff(1) * std::exp(cplx(-0.7 * p.dt, p.dt))) < 1e-16);

    // a pure equilibrium of the linear problem is preserved exactly:
    // u* = f / (gamma - ik~^3) mode-wise, so stepping from it stays put
    ModelParams q = base_params();
    q.disable_nonlinearity = true;
    q.forcing = fn(g128, [](double x) { return std::cos(3 * x); });
    SpectralField eq = SpectralField::zeros(g128);
    {
        const double kt = g128.wavenumber(3);
        eq.set_coeff(3, q.forcing.coeff(3) / cplx(q.gamma, -kt * kt * kt));
    }
    EtdRk4 st2(q);
    std::vector<cplx> e(eq.coeffs().begin(), eq.coeffs().end());
    st2.step(e, 0.0, nullptr);
    CHECK(std::abs(e[3] - eq.coeff(3)) < 1e-14 * std::abs(eq.coeff(3)));
}

TEST_CASE("step: zero state with zero forcing stays zero") {
    ModelParams p = base_params();
    EtdRk4 st(p);
    std::vector<cplx> c(g128.n_modes(), cplx{});
    for (int i = 0; i < 10; ++i) st.step(c, i * p.dt, nullptr);
    for (const cplx& v : c) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("step: fourth-order self-convergence via step doubling") {
    ModelParams p = base_params();
    p.forcing = fn(g128, [](double x) { return std::cos(x); });
    const SpectralField u0 = seeded_field(g128, 7, 6, 1.0);
    auto advance = [&](double dt, double T) {
        ModelParams q = p;
        q.dt = dt;
        const TrajectoryWindow t = integrate(u0, 0.0, T, q, nullptr,
                                             static_cast<int>(std::llround(T / dt)), false);
        return t.state(t.size() - 1);
    };
    const SpectralField ref = advance(1.25e-4, 0.5);
    const double e1 = advance(4e-3, 0.5).dist_l2(ref);
    const double e2 = advance(2e-3, 0.5).dist_l2(ref);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);  // ~2^4 with a margin
    CHECK(ratio < 21.0);
}

TEST_CASE("integrate: exact damping law at finite time") {
    ModelParams p = base_params();  // gamma = 0.5, f = 0, mu = 0
    const SpectralField u0 = seeded_field(g128, 3, 10, 1.0);
    const TrajectoryWindow t = integrate(u0, 0.0, 5.0, p, nullptr, 1000, false);
    const double want = std::exp(-0.5 * 5.0) * u0.l2();
    CHECK(rel_err(t.state(t.size() - 1).l2(), want) < 1e-8);
}

TEST_CASE("integrate: conserved quantities of the pure equation") {
    ModelParams p = base_params();
    p.gamma = 0.0;
    const SpectralField u0 = seeded_field(g128, 5, 10, 0.8);
    const TrajectoryWindow t = integrate(u0, 0.0, 2.0, p, nullptr, 200, true);
    const double l2_0 = u0.l2();
    const double phi_0 = phi1(u0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(t.state(i).coeff(0)) == 0.0);  // mean invariance, exact
        CHECK(rel_err(t.norms[i].l2, l2_0) < 1e-8);
    }
    CHECK(rel_err(phi1(t.state(t.size() - 1)), phi_0) < 1e-6);
}

TEST_CASE("integrate: hyperviscosity strictly increases per-mode damping") {
    ModelParams p = base_params();
    p.disable_nonlinearity = true;
    p.gamma = 0.2;
    const SpectralField u0 = seeded_field(g128, 9, 12, 1.0);
    ModelParams q = p;
    q.epsilon = 0.01;
    const TrajectoryWindow a = integrate(u0, 0.0, 1.0, p, nullptr, 1000, false);
    const TrajectoryWindow b = integrate(u0, 0.0, 1.0, q, nullptr, 1000, false);
    const SpectralField ua = a.state(a.size() - 1), ub = b.state(b.size() - 1);
    for (int k = 1; k <= 12; ++k) {
        CHECK(std::abs(ub.coeff(k)) < std::abs(ua.coeff(k)));
        CHECK(std::abs(ub.coeff(k)) <= std::abs(ua.coeff(k)));
    }
}

TEST_CASE("integrate: blow-up guard and argument validation") {
    ModelParams p = base_params();
    p.blowup_guard = 1e-4;  // guard far below the state scale
    const SpectralField u0 = seeded_field(g128, 3, 10, 1.0);
    CHECK_THROWS_AS(integrate(u0, 0.0, 1.0, p, nullptr, 10, false), BlowUpError);
    try {
        integrate(u0, 0.0, 1.0, p, nullptr, 10, false);
    } catch (const BlowUpError& e) {
        CHECK(e.t > 0.0);
    }
    p.blowup_guard = 1e6;
    CHECK_THROWS_AS(integrate(u0, 0.0, -1.0, p, nullptr, 1, false), std::invalid_argument);
    CHECK_THROWS_AS(integrate(u0, 0.0, 1.0005, p, nullptr, 1, false), std::invalid_argument);
}

TEST_CASE("integrate: control coverage is validated") {
    ModelParams p = base_params();
    p.mu = 1.0;
    p.m = 4;
    const SpectralField u0 = seeded_field(g128, 3, 10, 1.0);
    const TrajectoryWindow ctrl =
        TrajectoryWindow::constant(SpectralField::zeros(g128).project_low(4), 4, 0.0, 0.5, 6);
    CHECK_THROWS_AS(integrate(u0, 0.0, 1.0, p, &ctrl, 10, false), ConfigError);
}

TEST_CASE("trajectory window: interpolation and norms") {
    TrajectoryWindow w(g128, MeanMode::EnforcedZero, 4);
    w.start(1.0, 0.5);
    SpectralField a = SpectralField::zeros(g128);
    a.set_coeff(2, cplx(1.0, 0.0));
    SpectralField b = SpectralField::zeros(g128);
    b.set_coeff(2, cplx(3.0, 0.0));
    w.push_back(a);
    w.push_back(b);
    std::vector<cplx> out(5);
    w.eval(1.25, out);
    CHECK(std::abs(out[2] - cplx(2.0, 0.0)) < 1e-14);
    w.eval(1.5, out);  // sample-aligned times return stored values exactly
    CHECK(out[2] == cplx(3.0, 0.0));
    CHECK_THROWS_AS(w.eval(2.0, out), ConfigError);
    CHECK(w.covers(1.0, 1.5));
    CHECK(!w.covers(0.5, 1.5));
    CHECK(w.x_norm() == w.h2_of_sample(1));

    const TrajectoryWindow s = TrajectoryWindow::affine(1.0, w, -1.0, w);
    CHECK(s.x_norm() == 0.0);
}

TEST_CASE("integrate: window spacing and norm records") {
    ModelParams p = base_params();
    p.forcing = fn(g128, [](double x) { return std::cos(x); });
    const SpectralField u0 = seeded_field(g128, 3, 10, 1.0);
    const TrajectoryWindow t = integrate(u0, 0.0, 0.1, p, nullptr, 10, true);
    CHECK(t.size() == 11);
    CHECK(std::abs(t.spacing() - 0.01) < 1e-15);
    CHECK(t.norms.size() == t.size());
    CHECK(rel_err(t.norms[0].h2, u0.h2()) < 1e-12);
}
