#pragma once

#include "landau/equilibria.hpp"
#include "landau/initial_data.hpp"
#include "landau/linear.hpp"
#include "landau/spectral.hpp"
#include "landau/types.hpp"

#include <functional>
#include <vector>

namespace landau::nonlinear {

// Which parts of the right-hand side are active.
//   linear:    -E_k e^{ikvt} mu'(v)
//   quadratic: -sum_l E_l e^{ilvt} [d_v g_{k-l} - i(k-l) t g_{k-l}]
//   feedback:  the field is computed at all (off: the state is frozen)
struct Couplings {
    bool linear = true;
    bool quadratic = true;
    bool feedback = true;
};

// E_k = rho_k / (i k), E_0 = 0; index is k for k = 0..k_max.
std::vector<cplx> field(const std::vector<cplx>& rho);

class Solver {
public:
    Solver(const Equilibrium& eq, const Grid& grid, Couplings c = {});

    const Grid& grid() const { return grid_; }
    const Couplings& couplings() const { return c_; }

    // rho_k(t) = int g_k(v) e^{-ikvt} dv for k = 0..k_max (entry 0 is set to 0)
    std::vector<cplx> density(const SpectralState& s, double t);
    void rhs(const SpectralState& s, double t, SpectralState& out);
    // classical RK4 on k >= 0; negative modes are refilled by conjugation and the
    // relative size of Im g_0 removed by that symmetrization is returned.
    // Throws StabilityError when dt k_max (1 + t) max|E| >= 0.5.
    double step(SpectralState& s, double dt);
    // largest |contribution| to modes k_max < |k| <= 2 k_max that the truncation drops
    double dropped_magnitude(const SpectralState& s, double t);

    bool check_stability = true;

private:
    void phases(double t);  // fills phase_[l] = e^{ilvt}, l = 0..k_max

    Equilibrium eq_;
    Grid grid_;
    Couplings c_;
    std::vector<double> dmu_;
    std::vector<CVector> phase_;
    std::vector<CVector> dg_;  // d_v g_m - i m t g_m, m = 0..k_max
    SpectralState k1_, k2_, k3_, k4_, tmp_;
    double last_emax_ = 0.0;
};

struct RunConfig {
    Equilibrium eq = Equilibrium::gaussian();
    Grid grid;
    double dt = 5e-3;
    double T = 10.0;
    InitialData f0;
    int record_stride = 1;    // density trace every n steps
    int snapshot_stride = 0;  // keep the state every n steps (0: final only)
    bool dense = false;       // accumulate the closure identity along the run
    Couplings couplings;
    bool check_stability = true;
};

struct ConservationLog {
    std::vector<double> t;
    std::vector<double> mass;  // int g_0 dv
    std::vector<double> l2;    // sum_k dv sum_j |g_k|^2
    std::vector<double> reality_drift;
    std::vector<double> dropped;

    double mass_drift() const;
    double l2_drift() const;  // absolute
    double l2_relative_drift() const;
    double max_reality_drift() const;
};

struct RunResult {
    std::vector<linear::DensityTrace> traces;  // k = 1..k_max, spacing dt * record_stride
    ConservationLog log;
    std::vector<SpectralState> snapshots;
    SpectralState final_state;
    double closure_residual = -1.0;  // only with dense = true
    double closure_scale = 0.0;      // max |rho| over the run, for relative reporting
    double spectral_floor = 0.0;
};

using Observer = std::function<void(const SpectralState&, const std::vector<cplx>& rho)>;

// Checks the resolution rule, then steps from f0 to T.
RunResult run(const RunConfig& cfg, const Observer& observer = {});

// Tracks rho_k + int (t-s) mu_hat(k(t-s)) rho_k ds - S_k with the nonlinear
// source S_k(t) = f0_hat(k, kt) - sum_l int (k(t-s)/l) rho_l(s) g_{k-l, kt-ls}(s) ds.
// The s-integrals are accumulated by the trapezoid rule at every step.
class ClosureTracker {
public:
    ClosureTracker(const Equilibrium& eq, const SpectralState& initial, bool quadratic, double dt);
    // feed the state at the next step time (the first call must be the initial state)
    void push(const SpectralState& s, const std::vector<cplx>& rho);
    double max_residual() const { return worst_; }

private:
    Equilibrium eq_;
    Grid grid_;
    bool quadratic_;
    double dt_;
    int n_ = 0;
    SpectralState initial_;
    std::vector<std::vector<cplx>> rho_hist_;  // [k][n]
    std::vector<CVector> A_, B_;               // [k][j]
    std::vector<CVector> prevA_, prevB_;       // integrands at the previous step
    std::vector<double> ker_;
    double worst_ = 0.0;
};

}  // namespace landau::nonlinear
