#include "kdvnudge/kernels.hpp"

#include <omp.h>

#include <cstdlib>

namespace kdv::par {

namespace {
int g_threads = [] {
    if (const char* env = std::getenv("KDVNUDGE_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
}();
}

bool& enabled() {
    static bool on = true;
    return on;
}

int threads() { return g_threads; }

void set_threads(int n) {
    if (n > 0) g_threads = n;
}

std::size_t& grain() {
    static std::size_t g = 1 << 13;
    return g;
}

int detail::resolve_team(std::size_t n) {
    if (!enabled() || n < grain() || g_threads <= 1) return 1;
    return g_threads;
}

}  // namespace kdv::par
