#pragma once

#include "kdvnudge/window.hpp"

namespace kdv {

struct ModelParams {
    GridSpec grid{};
    double gamma = 0.5;    // damping
    double mu = 0.0;       // nudging gain
    int m = 0;             // observed-mode cutoff (0 = no observation)
    double epsilon = 0.0;  // optional hyperviscosity
    SpectralField forcing; // mean-zero, time-independent
    double dt = 1e-3;
    double blowup_guard = 1e6;  // H^2 guard; the damped equation is globally
                                // well-posed, so tripping it means numerics broke
    MeanMode mean = MeanMode::EnforcedZero;

    // Test hooks.
    bool disable_nonlinearity = false;
    // Move the whole feedback -mu (P_m w - v) into the nonlinear stage instead
    // of keeping -mu P_m w in the linear symbol. Only sensible for mu*dt << 1;
    // makes identically-seeded twin runs agree bitwise.
    bool explicit_nudging = false;

    void validate() const;
};

// Per-mode complex rate of the exactly-integrated linear part:
// lambda_k = i k~^3 - gamma - mu X_{1<=k<=m} - epsilon k~^4.
struct LinearSymbol {
    std::vector<cplx> lambda;
    static LinearSymbol of(const ModelParams& p);
};

// Nonlinear/forcing stage: -1/2 d_x dealias(w*w) + f + mu v (linear terms live
// in LinearSymbol). v_now, when present, must lie in H_m.
SpectralField nonlinear_rhs(const SpectralField& w, const ModelParams& p,
                            const SpectralField* v_now);

// Fourth-order exponential Runge-Kutta step with exact linear propagation.
// The phi-weights are evaluated by contour quadrature so small |lambda dt|
// does not cancel catastrophically.
class EtdRk4 {
public:
    explicit EtdRk4(const ModelParams& p);

    const ModelParams& params() const { return p_; }
    // Advance coeffs in place from t to t+dt. control may be null.
    void step(std::vector<cplx>& c, double t, const TrajectoryWindow* control);

    // Coupled reference+nudged twin step: u follows the mu=0 equation, w the
    // nudged equation with v = P_m u taken from u's own stage values (the
    // continuous-observation surrogate).
    void twin_step(std::vector<cplx>& u, std::vector<cplx>& w, double t, const EtdRk4& ref);

    static int contour_points() { return 64; }

private:
    void stage_rhs(const std::vector<cplx>& c, double t, const TrajectoryWindow* control,
                   std::vector<cplx>& out);
    void stage_rhs_obs(const std::vector<cplx>& c, const std::vector<cplx>* obs,
                       std::vector<cplx>& out);

    ModelParams p_;
    std::vector<cplx> E_, E2_, Q_, f1_, f2_, f3_;
    std::vector<cplx> nu_, na_, nb_, nc_, a_, b_, cc_, vbuf_;
    std::vector<double> phys_, prod_;
};

struct Recorder {
    int band = 0;
    int stride = 1;         // steps between samples
    bool record_norms = false;
    TrajectoryWindow out;
};

// Integrate w0 over [t0, t1]; (t1-t0) must be an integer number of dt steps.
// The initial state is truncated to the dealias cutoff. Control, when present,
// is interpolated piecewise-linearly in time and must cover [t0, t1].
void integrate_multi(const SpectralField& w0, double t0, double t1, const ModelParams& p,
                     const TrajectoryWindow* control, std::span<Recorder> recorders);

TrajectoryWindow integrate(const SpectralField& w0, double t0, double t1, const ModelParams& p,
                           const TrajectoryWindow* control = nullptr, int sample_every = 1,
                           bool record_norms = true);

}  // namespace kdv
