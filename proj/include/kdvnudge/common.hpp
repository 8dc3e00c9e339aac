#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace kdv {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Integration diverged or produced non-finite values; carries the time of failure.
struct BlowUpError : std::runtime_error {
    double t;
    explicit BlowUpError(double t_, const std::string& what)
        : std::runtime_error(what), t(t_) {}
};

// Newton or W-map certificate failed to reach tolerance.
struct NonConvergenceError : std::runtime_error {
    double residual;
    NonConvergenceError(double r, const std::string& what)
        : std::runtime_error(what), residual(r) {}
};

// No mode count m can satisfy the requested conditions (m-independent condition fails).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad config file, bad key, bad value, or a control window that does not cover the run.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CLI exit codes (see README).
enum ExitCode : int {
    exit_ok = 0,
    exit_blowup = 1,
    exit_nonconvergence = 2,
    exit_infeasible = 3,
    exit_config = 4,
};

}  // namespace kdv
