#pragma once

#include "landau/equilibria.hpp"
#include "landau/initial_data.hpp"
#include "landau/spectral.hpp"
#include "landau/types.hpp"

#include <string>
#include <vector>

namespace landau::echo {

// f0 = eps1 cos(k1 x + eta1 v) M(v) + eps2 cos(k2 x + eta2 v) M(v)
struct EchoConfig {
    Equilibrium eq = Equilibrium::free();
    Grid grid{4, 8.0, 1024};
    double dt = 5e-3;
    double T = 15.0;
    int k1 = 1;
    double eta1 = 10.0;
    double eps1 = 1e-3;
    int k2 = 1;
    double eta2 = 0.0;
    double eps2 = 1e-3;
};

InitialData two_wave(const EchoConfig& c);

// Second Picard iterate of the density around free transport:
//   rho2_k(t) = -sum_l int_0^t (k(t-s)/l) f0_hat(l, l s) f0_hat(k-l, kt-ls) ds,
// l restricted to 0 < |l|, |k-l| <= k_max. Adaptive quadrature in s.
cplx picard_density(const InitialData& f0, int k, double t, int k_max);

struct EchoPeak {
    int k = 0;
    std::string kind;  // "primary" (linear burst of a wave) or "echo" / "secondary"
    double predicted_t = 0.0;
    double predicted_amp = 0.0;
    double measured_t = 0.0;
    double measured_amp = 0.0;
    double rel_error = 0.0;
    bool found = false;
};

struct EchoReport {
    std::vector<EchoPeak> peaks;
    bool inconclusive = false;
    double noise_floor = 1e-13;
    double dt = 0.0;
    std::string note;
};

inline constexpr double noise_floor = 1e-13;

// Runs the nonlinear solver on two-wave data and compares field bursts with
// the free-transport prediction (first order for the waves themselves,
// second-order Picard for generated modes k1 + k2 and |k1 - k2|).
EchoReport echo_experiment(const EchoConfig& c);

}  // namespace landau::echo
