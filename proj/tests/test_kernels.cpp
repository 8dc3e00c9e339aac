#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdvnudge/functionals.hpp"
#include "kdvnudge/kernels.hpp"

using namespace kdv;

namespace {
struct ParGuard {
    bool saved = par::enabled();
    std::size_t saved_grain = par::grain();
    ~ParGuard() {
        par::enabled() = saved;
        par::grain() = saved_grain;
    }
};
}

TEST_CASE("parallel kernels reproduce the serial reference") {
    ParGuard guard;
    par::grain() = 1;  // force the OpenMP path even at small sizes
    const GridSpec g = GridSpec::make(2.0 * pi, 1 << 14);
    const SpectralField u = seeded_field(g, 5, g.dealias_cutoff / 2, 1.0);
    const SpectralField v = seeded_field(g, 6, g.dealias_cutoff / 2, 1.0);

    par::enabled() = false;
    const SpectralField prod_s = dealias_product(u, v);
    const double h2_s = u.h2(), phi_s = phi2(u), dot_s = SpectralField::dot(u, v);
    par::enabled() = true;
    const SpectralField prod_p = dealias_product(u, v);
    const double h2_p = u.h2(), phi_p = phi2(u), dot_p = SpectralField::dot(u, v);

    CHECK(prod_s.dist_l2(prod_p) == 0.0);  // pointwise kernels agree bitwise
    CHECK(std::abs(h2_s - h2_p) <= 1e-13 * h2_s);
    CHECK(std::abs(phi_s - phi_p) <= 1e-12 * std::max(1.0, std::abs(phi_s)));
    CHECK(std::abs(dot_s - dot_p) <= 1e-12 * std::max(1.0, std::abs(dot_s)));
}

TEST_CASE("parallel reductions are deterministic run to run") {
    ParGuard guard;
    par::grain() = 1;
    par::enabled() = true;
    const GridSpec g = GridSpec::make(2.0 * pi, 1 << 15);
    const SpectralField u = seeded_field(g, 17, g.dealias_cutoff / 2, 3.0);
    const double a = u.h2();
    for (int r = 0; r < 20; ++r) CHECK(u.h2() == a);
    const double p = phi1(u);
    for (int r = 0; r < 20; ++r) CHECK(phi1(u) == p);
}

TEST_CASE("one integrator step matches between execution modes") {
    ParGuard guard;
    par::grain() = 1;
    ModelParams p;
    p.grid = GridSpec::make(2.0 * pi, 1 << 12);
    p.gamma = 0.4;
    p.dt = 1e-4;
    p.forcing = SpectralField::from_modes(p.grid, std::vector<ForcingMode>{{1, 1.0, 0.0}});
    const SpectralField u0 = seeded_field(p.grid, 3, 12, 1.0);

    auto run = [&] {
        EtdRk4 st(p);
        std::vector<cplx> c(u0.coeffs().begin(), u0.coeffs().end());
        for (int i = 0; i < 5; ++i) st.step(c, i * p.dt, nullptr);
        return c;
    };
    par::enabled() = false;
    const auto serial = run();
    par::enabled() = true;
    const auto parallel = run();
    double worst = 0;
    for (std::size_t k = 0; k < serial.size(); ++k)
        worst = std::max(worst, std::abs(serial[k] - parallel[k]));
    CHECK(worst < 1e-15);
}

TEST_CASE("for_tasks covers every index exactly once") {
    std::vector<int> hits(257, 0);
    par::for_tasks(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (int h : hits) CHECK(h == 1);
}
