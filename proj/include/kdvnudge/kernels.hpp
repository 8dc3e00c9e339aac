#pragma once

// Data-parallel kernels used by the spectral core. Every kernel has a serial
// path and an OpenMP path; the serial path is the reference the tests compare
// against and the benchmark times. Reductions are deterministic for a fixed
// thread count: each thread sums a contiguous chunk and the partials are
// combined in chunk order.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace kdv::par {

// Global switches. `enabled` gates the OpenMP paths, `threads` fixes the team
// size (recorded in run manifests), `grain` is the minimum problem size worth
// forking for.
bool& enabled();
int threads();
void set_threads(int n);
std::size_t& grain();

namespace detail {
int resolve_team(std::size_t n);
}

template <class F>
void for_each(std::size_t n, F&& f) {
    const int team = detail::resolve_team(n);
    if (team <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
#pragma omp parallel for num_threads(team) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) f(static_cast<std::size_t>(i));
}

// Deterministic sum of f(0..n-1).
template <class F>
double sum(std::size_t n, F&& f) {
    const int team = detail::resolve_team(n);
    if (team <= 1) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += f(i);
        return acc;
    }
    std::vector<double> part(team, 0.0);
#pragma omp parallel num_threads(team)
    {
#pragma omp for schedule(static) nowait
        for (long long c = 0; c < team; ++c) {
            const std::size_t lo = n * c / team, hi = n * (c + 1) / team;
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) acc += f(i);
            part[c] = acc;
        }
    }
    double acc = 0.0;
    for (double p : part) acc += p;
    return acc;
}

template <class F>
double max(std::size_t n, F&& f) {
    const int team = detail::resolve_team(n);
    if (team <= 1) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, f(i));
        return m;
    }
    std::vector<double> part(team, 0.0);
#pragma omp parallel num_threads(team)
    {
#pragma omp for schedule(static) nowait
        for (long long c = 0; c < team; ++c) {
            const std::size_t lo = n * c / team, hi = n * (c + 1) / team;
            double m = 0.0;
            for (std::size_t i = lo; i < hi; ++i) m = std::max(m, f(i));
            part[c] = m;
        }
    }
    double m = 0.0;
    for (double p : part) m = std::max(m, p);
    return m;
}

// Coarse-grain task fan-out (sweep points, W-map certificate pairs). Dynamic
// schedule; callers must gather results by index to stay deterministic.
template <class F>
void for_tasks(std::size_t n, F&& f) {
    if (!enabled() || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const int team = std::min<std::size_t>(threads(), n);
#pragma omp parallel for num_threads(team) schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i) f(static_cast<std::size_t>(i));
}

}  // namespace kdv::par
