#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdvnudge/field.hpp"
#include "test_util.hpp"

using namespace kdv;
using namespace kdv::testing;

namespace {
const GridSpec g64 = GridSpec::make(2.0 * pi, 64);
const GridSpec g128 = GridSpec::make(2.0 * pi, 128);

SpectralField sample_fn(const GridSpec& g, double (*fn)(double), MeanMode mean = MeanMode::EnforcedZero) {
    std::vector<double> u(g.N);
    for (int i = 0; i < g.N; ++i) u[i] = fn(g.L * i / g.N);
    return SpectralField::from_samples(g, u, mean);
}
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(GridSpec::make(2 * pi, 6), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(2 * pi, 65), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(-1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::make(2 * pi, 64, 32), std::invalid_argument);  // > N/2-1
    CHECK(GridSpec::make(2 * pi, 64).dealias_cutoff == 21);
    const GridSpec g = g64;
    for (int k = 1; k <= g.nyquist(); ++k) CHECK(g.wavenumber(k) > g.wavenumber(k - 1));
}

TEST_CASE("make_field: sin(x) populates the single conjugate pair") {
    const SpectralField f = sample_fn(g64, [](double x) { return std::sin(x); });
    CHECK(std::abs(f.coeff(1) - cplx(0, -0.5)) < 1e-14);
    CHECK(std::abs(f.coeff(-1) - cplx(0, 0.5)) < 1e-14);
    for (int k = 0; k < f.n_modes(); ++k)
        if (k != 1) CHECK(std::abs(f.coeff(k)) < 1e-12);
}

TEST_CASE("make_field: constant samples vanish under the zero-mean policy") {
    std::vector<double> ones(g64.N, 1.0);
    const SpectralField f = SpectralField::from_samples(g64, ones);
    for (int k = 0; k < f.n_modes(); ++k) CHECK(std::abs(f.coeff(k)) < 1e-14);
    const SpectralField free = SpectralField::from_samples(g64, ones, MeanMode::Free);
    CHECK(std::abs(free.coeff(0) - 1.0) < 1e-14);
}

TEST_CASE("make_field: two-pair field round-trips and matches the direct DFT") {
    const SpectralField f =
        sample_fn(g64, [](double x) { return std::sin(x) + 0.5 * std::cos(3 * x); });
    int populated = 0;
    for (int k = 1; k < f.n_modes(); ++k)
        if (std::abs(f.coeff(k)) > 1e-12) ++populated;
    CHECK(populated == 2);

    std::vector<double> orig(g64.N);
    for (int i = 0; i < g64.N; ++i) orig[i] = std::sin(g64.L * i / g64.N) + 0.5 * std::cos(3.0 * g64.L * i / g64.N);
    const auto back = f.samples();
    double maxerr = 0;
    for (int i = 0; i < g64.N; ++i) maxerr = std::max(maxerr, std::abs(back[i] - orig[i]));
    CHECK(maxerr < 1e-12);

    const auto direct = naive_dft(orig);
    for (int k = 0; k < f.n_modes(); ++k) CHECK(std::abs(f.coeff(k) - direct[k]) < 1e-12);
}

TEST_CASE("make_field errors") {
    std::vector<double> bad(g64.N - 1, 0.0);
    CHECK_THROWS_AS(SpectralField::from_samples(g64, bad), std::invalid_argument);
    std::vector<double> nan(g64.N, 0.0);
    nan[3] = std::nan("");
    CHECK_THROWS_AS(SpectralField::from_samples(g64, nan), std::invalid_argument);
}

TEST_CASE("derivative: closed forms") {
    // exact single-mode constructions keep the sign checks roundoff-free
    const SpectralField s =
        SpectralField::from_modes(g64, std::vector<ForcingMode>{{1, 1.0, -0.5 * pi}});
    const SpectralField c = SpectralField::from_modes(g64, std::vector<ForcingMode>{{1, 1.0, 0.0}});
    CHECK(s.derivative(1).dist_l2(c) < 1e-15);
    CHECK(s.derivative(3).dist_l2(-1.0 * c) < 1e-15);  // (ik)^3 sign

    const SpectralField c5 = sample_fn(g64, [](double x) { return std::cos(5 * x); });
    const SpectralField want = -25.0 * sample_fn(g64, [](double x) { return std::cos(5 * x); });
    const SpectralField got = c5.derivative(2);
    for (int k = 0; k < got.n_modes(); ++k) CHECK(std::abs(got.coeff(k) - want.coeff(k)) < 1e-12);

    CHECK_THROWS_AS(s.derivative(5), std::invalid_argument);
    CHECK(std::abs(s.derivative(0).coeff(1) - s.coeff(1)) == 0.0);
}

TEST_CASE("projections: split examples and algebra") {
    const SpectralField f =
        sample_fn(g64, [](double x) { return std::sin(x) + std::sin(2 * x); });
    const SpectralField lo = f.project_low(1), hi = f.project_high(1);
    CHECK(lo.dist_l2(sample_fn(g64, [](double x) { return std::sin(x); })) < 1e-13);
    CHECK(hi.dist_l2(sample_fn(g64, [](double x) { return std::sin(2 * x); })) < 1e-13);
    CHECK(f.project_low(g64.nyquist()).dist_l2(f) < 1e-15);  // m >= N/2 acts as identity
    CHECK(f.project_high(1).project_low(1).l2() == 0.0);     // P Q = 0
    CHECK(lo.project_low(1).dist_l2(lo) == 0.0);             // idempotent

    for (std::uint64_t s = 1; s <= 200; ++s) {
        const SpectralField u = seeded_field(g128, s, 20, 1.0);
        const int m = 1 + static_cast<int>(s % 16);
        const SpectralField p = u.project_low(m), q = u.project_high(m);
        CHECK((p + q).dist_l2(u) < 1e-14);
        for (double (SpectralField::*norm)() const : {&SpectralField::l2, &SpectralField::h1, &SpectralField::h2}) {
            const double lhs = (p.*norm)() * (p.*norm)() + (q.*norm)() * (q.*norm)();
            const double rhs = (u.*norm)() * (u.*norm)();
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, rhs));
        }
        // Poincare on the complement: |Q w| <= L/(2 pi (m+1)) |w_x|
        CHECK(q.l2() <= g128.L / (2.0 * pi * (m + 1)) * q.h1() * (1.0 + 1e-12));
    }
}

TEST_CASE("norms: closed forms, Agmon, negative norms") {
    const SpectralField s = sample_fn(g64, [](double x) { return std::sin(x); });
    const NormSet n = s.norms();
    CHECK(rel_err(n.l2, std::sqrt(pi)) < 1e-12);
    CHECK(rel_err(n.h1, std::sqrt(pi)) < 1e-12);
    CHECK(rel_err(n.hm1, std::sqrt(pi)) < 1e-12);
    CHECK(std::abs(n.linf - 1.0) < 1e-10);

    const NormSet z = SpectralField::zeros(g64).norms();
    CHECK(z.l2 == 0.0);
    CHECK(z.h2 == 0.0);
    CHECK(z.linf == 0.0);

    const SpectralField cc =
        sample_fn(g64, [](double x) { return std::cos(x) + std::cos(2 * x); });
    CHECK(rel_err(cc.h2() * cc.h2(), 17.0 * pi) < 1e-12);

    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const SpectralField u = seeded_field(g128, seed, 25, 0.5 + (seed % 9));
        CHECK(u.linf() * u.linf() <= u.l2() * u.h1() * (1.0 + 1e-8));
    }
}

TEST_CASE("parseval against physical quadrature") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SpectralField u = seeded_field(g128, seed, 30, 2.0);
        const auto samples = u.samples();
        double quad = 0;
        for (double v : samples) quad += v * v;
        quad *= g128.dx();
        CHECK(rel_err(u.l2() * u.l2(), quad) < 1e-10);
    }
}

TEST_CASE("dealias_product: identities and the fine-grid oracle") {
    const SpectralField s = sample_fn(g64, [](double x) { return std::sin(x); });
    // sin^2 = (1 - cos 2x)/2; the zero-mean policy strips the constant part
    const SpectralField want = -0.5 * sample_fn(g64, [](double x) { return std::cos(2 * x); });
    CHECK(dealias_product(s, s).dist_l2(want) < 1e-13);
    CHECK(dealias_product(SpectralField::zeros(g64), s).l2() == 0.0);
    CHECK_THROWS_AS(dealias_product(s, sample_fn(g128, [](double x) { return std::sin(x); })),
                    std::invalid_argument);

    // free-mean keeps the constant part
    const SpectralField sf = sample_fn(g64, [](double x) { return std::sin(x); }, MeanMode::Free);
    CHECK(std::abs(dealias_product(sf, sf).coeff(0) - 0.5) < 1e-13);

    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const SpectralField a = seeded_field(g128, 2 * seed, g128.N / 6, 1.0);
        const SpectralField b = seeded_field(g128, 2 * seed + 1, g128.N / 6, 1.0);
        const SpectralField got = dealias_product(a, b);
        // independent oracle: direct evaluation on a 2N grid, direct DFT back
        const auto ua = naive_eval(a, 2 * g128.N);
        const auto ub = naive_eval(b, 2 * g128.N);
        std::vector<double> prod(2 * g128.N);
        for (int i = 0; i < 2 * g128.N; ++i) prod[i] = ua[i] * ub[i];
        const auto ref = naive_dft(prod);
        for (int k = 1; k <= g128.dealias_cutoff; ++k)
            CHECK(std::abs(got.coeff(k) - ref[k]) < 1e-12);
    }
}

TEST_CASE("conservation identities of the dealiased calculus") {
    // integral of w^l w_x vanishes, as does integral of w_xxx w
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const SpectralField w = seeded_field(g128, seed, 20, 1.5);
        const SpectralField wx = w.derivative(1);
        for (int l = 1; l <= 4; ++l) {
            const int M = 4 * g128.N;
            const auto uw = w.samples(4);
            const auto uwx = wx.samples(4);
            double acc = 0;
            for (int i = 0; i < M; ++i) acc += std::pow(uw[i], l) * uwx[i];
            acc *= g128.L / M;
            CHECK(std::abs(acc) < 1e-10 * std::max(1.0, w.l2()));
        }
        CHECK(std::abs(SpectralField::dot(w.derivative(3), w)) < 1e-10 * std::max(1.0, w.h2()));
    }
}

TEST_CASE("field serialization round trip") {
    const SpectralField u = seeded_field(g128, 99, 17, 1.25);
    save_field(u, "/tmp/kdv_test_field.txt");
    const SpectralField back = load_field("/tmp/kdv_test_field.txt");
    CHECK(back.grid() == u.grid());
    CHECK(back.dist_l2(u) == 0.0);  // %.17g round-trips doubles exactly

    SpectralField fm = SpectralField::zeros(g64, MeanMode::Free);
    fm.set_coeff(0, 0.75);
    fm.set_coeff(2, cplx(0.1, -0.2));
    save_field(fm, "/tmp/kdv_test_field2.txt");
    const SpectralField fb = load_field("/tmp/kdv_test_field2.txt");
    CHECK(std::abs(fb.coeff(0) - 0.75) == 0.0);
    CHECK(std::abs(fb.coeff(2) - cplx(0.1, -0.2)) == 0.0);
}

TEST_CASE("seeded generator is deterministic and hits the requested norm") {
    const SpectralField a = seeded_field(g128, 1234, 10, 2.5);
    const SpectralField b = seeded_field(g128, 1234, 10, 2.5);
    CHECK(a.dist_l2(b) == 0.0);
    CHECK(rel_err(a.h2(), 2.5) < 1e-12);
    const SpectralField c = seeded_field(g128, 1235, 10, 2.5);
    CHECK(c.dist_l2(a) > 1e-3);
}
