#pragma once

#include "kdvnudge/integrator.hpp"

namespace kdv {

// Hamiltonian-structure functionals. Cubic and quartic integrands are
// evaluated on a 2x oversampled physical grid, which integrates trigonometric
// polynomials of the stored bandwidth exactly.

double phi1(const SpectralField& w);  // integral of w_x^2 - w^3/3
double phi2(const SpectralField& w);  // integral of (9/5) w_xx^2 - 3 w w_x^2 + w^4/4
double psi(const SpectralField& delta, const SpectralField& xi);  // integral of d_x^2 - xi d^2

// Slack of |w_x|^2 <= 2 phi1(w) + 2 a^{10/3}, a = max(|w|, r0_proxy).
// Nonnegative for every mean-zero field.
double h1_from_phi1_slack(const SpectralField& w, double r0_proxy = 0.0);

// Slack of |w_xx|^2 <= phi2(w) + (45/64) a^3 b with a >= |w|, b >= |w_x|.
double h2_from_phi2_slack(const SpectralField& w, double a, double b);

// Slack of |d_x|^2 <= psi(d) + r_inf |d|^2; requires r_inf >= |xi|_inf.
double psi_lower_slack(const SpectralField& delta, const SpectralField& xi, double r_inf);

// Residual of d/ds|w|^2 + 2 gamma |w|^2 + 2 mu |P_m w|^2 + 2 eps |w_xx|^2
//             - 2 (f, w) - 2 mu (v, P_m w)
// at interior samples (centered differences). Also reports the magnitude scale
// of the balance terms for relative comparisons.
struct BalanceResiduals {
    std::vector<double> t;
    std::vector<double> residual;
    double scale = 0;
};
BalanceResiduals energy_balance_residual(const TrajectoryWindow& traj, const ModelParams& p,
                                         const TrajectoryWindow* control);

struct FunctionalSample {
    double t = 0;
    double phi1 = 0, phi2 = 0, psi = 0;
    double h1_bound_slack = 0, h2_bound_slack = 0, psi_bound_slack = 0;
};

// Diagnostics record for one trajectory sample; a_max/b_max are the run's
// empirical |w| and |w_x| maxima. For pair runs, pass delta, xi and the
// empirical sup of |xi|_inf to fill the Psi entries as well.
FunctionalSample functional_sample(double t, const SpectralField& w, double a_max, double b_max,
                                   const SpectralField* delta = nullptr,
                                   const SpectralField* xi = nullptr, double r_inf = 0);

}  // namespace kdv
