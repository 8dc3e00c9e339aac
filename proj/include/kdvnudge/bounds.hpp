#pragma once

#include <cstdint>
#include <vector>

#include "kdvnudge/common.hpp"

namespace kdv::bounds {

struct BoundInputs {
    double gamma = 1.0;
    double L = 2.0 * pi;
    double mu = 0.0;
    double rho = 4.0;       // X-ball radius for the control
    double alpha = 1.0;     // in [1, 2)
    double beta = 4.0 / 3.0;
    double epsilon = 0.0;   // in [0, 1)
    double c_universal = 1.0;
    double f_l2 = 1.0, f_linf = 1.0, f_h2 = 1.0;

    void validate() const;
};

// Closed-form bounding expressions, computed in the substitution order
// R~0 -> R~~1 -> R0 -> R~1 -> (C~1, C~2, R~2) -> R1 -> (C1, C2, R2) -> Rinf -> R~', R'.
// Entries with suffix 0 are the same chain re-run at mu = 0 (with
// mu^((alpha-1)/2) evaluated literally, so 0^0 = 1 at alpha = 1).
struct BoundReport {
    double r0_tilde = 0;
    double r1_tildetilde = 0;
    double r0 = 0;
    double r1_tilde = 0;
    double c1_tilde = 0, c2_tilde = 0;
    double r2_tilde = 0;
    double r1 = 0;
    double c1 = 0, c2 = 0;
    double r2 = 0;
    double r_inf = 0;
    double r_prime_tilde = 0;
    double r_prime = 0;
    double c3 = 0;
    double r0_0 = 0, r1_0 = 0, r2_0 = 0, r_inf_0 = 0, r_prime_0 = 0, c3_0 = 0;
};

BoundReport compute_bounds(const BoundInputs& in);

enum class Cond { c1 = 1, c2 = 2, c3 = 3, c4 = 4, c3p = 5, c5 = 6, c6 = 7, c4p = 8 };

struct ConditionEntry {
    double lhs = 0, rhs = 0;
    bool pass = false;
};

struct ConditionTable {
    std::int64_t m = 0;
    ConditionEntry cond1, cond2, cond3, cond4, cond3p, cond5, cond6, cond4p;
    const ConditionEntry& get(Cond c) const;
};

ConditionTable check_conditions(const BoundReport& r, const BoundInputs& in, std::int64_t m);

// Smallest integer m for which every selected condition holds
// (doubling-then-bisection; all left-hand sides are nonincreasing in m).
// Throws InfeasibleError when an m-independent condition fails.
std::int64_t minimal_m(const BoundInputs& in, const std::vector<Cond>& which);

// Real-valued threshold (largest condition crossing); the integer minimal_m is
// its ceiling. Used by the scaling sweeps, where thresholds overflow int64.
double minimal_m_real(const BoundInputs& in, const std::vector<Cond>& which);

enum class SweepTarget { mu, gamma, f_h2 };

struct ScalingFit {
    double exponent = 0;
    std::vector<double> param, m;
};

// Least-squares slope of log(minimal m) against log(parameter) over the grid.
// For f_h2 sweeps all three forcing norms are scaled together.
ScalingFit scaling_exponent(const BoundInputs& tmpl, const std::vector<double>& grid,
                            SweepTarget target, const std::vector<Cond>& which);

double lipschitz_constant(const BoundReport& r, const BoundInputs& in, std::int64_t m);

// The radius rho and the attractor bound R = R2|_{mu=0}(rho) are defined in
// terms of each other; iterate rho -> 4 R and report honestly.
struct RhoFixedPoint {
    bool converged = false;
    double rho = 0;
    std::vector<double> history;
};
RhoFixedPoint rho_fixed_point(BoundInputs in, int max_iter = 64, double rel_tol = 1e-10);

}  // namespace kdv::bounds
