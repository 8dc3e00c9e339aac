// Timing comparison of the OpenMP kernels against the serial reference path.
// Usage: bench_kernels [max_log2_n]

#include <chrono>
#include <cstdio>
#include <vector>

#include "kdvnudge/functionals.hpp"
#include "kdvnudge/kernels.hpp"

using namespace kdv;
using clk = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& f) {
    f();  // warm up
    std::vector<double> t(reps);
    for (int r = 0; r < reps; ++r) {
        const auto a = clk::now();
        f();
        t[r] = std::chrono::duration<double, std::milli>(clk::now() - a).count();
    }
    std::sort(t.begin(), t.end());
    return t[reps / 2];
}

struct Row {
    const char* name;
    std::function<double()> work;  // returns a checksum
};

}  // namespace

int main(int argc, char** argv) {
    const int max_log2 = argc > 1 ? std::atoi(argv[1]) : 20;
    std::printf("threads=%d grain=%zu\n", par::threads(), par::grain());
    std::printf("%-22s %10s %12s %12s %9s %12s\n", "kernel", "n", "serial(ms)", "openmp(ms)",
                "speedup", "max|delta|");

    for (int lg = 12; lg <= max_log2; lg += 2) {
        const int n = 1 << lg;
        const GridSpec g = GridSpec::make(2.0 * pi, n);
        const SpectralField u = seeded_field(g, 42, g.dealias_cutoff / 2, 1.0);
        const SpectralField v = seeded_field(g, 43, g.dealias_cutoff / 2, 1.0);

        ModelParams p;
        p.grid = g;
        p.gamma = 0.5;
        p.dt = 1e-4;
        p.forcing = SpectralField::from_modes(g, std::vector<ForcingMode>{{1, 1.0, 0.0}});
        EtdRk4 stepper(p);

        std::vector<Row> rows = {
            {"norms (reduce)", [&] { return u.h2() + u.l2(); }},
            {"dealias_product", [&] { return dealias_product(u, v).l2(); }},
            {"phi2 (oversampled)", [&] { return phi2(u); }},
            {"etdrk4 step", [&] {
                 std::vector<cplx> c(u.coeffs().begin(), u.coeffs().end());
                 stepper.step(c, 0.0, nullptr);
                 return std::abs(c[1]);
             }},
        };

        for (auto& row : rows) {
            const int reps = n >= (1 << 18) ? 5 : 20;
            par::enabled() = false;
            const double checksum_serial = row.work();
            const double ms_serial = time_ms(reps, [&] { (void)row.work(); });
            par::enabled() = true;
            const double checksum_par = row.work();
            const double ms_par = time_ms(reps, [&] { (void)row.work(); });
            std::printf("%-22s %10d %12.4f %12.4f %8.2fx %12.3e\n", row.name, n, ms_serial, ms_par,
                        ms_serial / ms_par, std::abs(checksum_serial - checksum_par));
        }
    }
    return 0;
}
