#pragma once

#include "landau/equilibria.hpp"
#include "landau/initial_data.hpp"
#include "landau/spectral.hpp"
#include "landau/types.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace landau::linear {

// rho_k(t_n), t_n = n dt, n = 0..N.
struct DensityTrace {
    int k = 1;
    double dt = 0.0;
    std::vector<cplx> rho;

    std::size_t size() const { return rho.size(); }
    double t(std::size_t n) const { return static_cast<double>(n) * dt; }
    // E_k = rho_k / (i k)
    cplx E(std::size_t n) const { return rho[n] / cplx{0.0, static_cast<double>(k)}; }
    std::vector<double> times() const;
    std::vector<double> abs_E() const;
};

using SourceFn = std::function<cplx(double)>;

// Number of steps T/dt, which must be an integer (within 1e-9) and at most 1e7.
std::size_t step_count(double dt, double T);

std::vector<cplx> sample_source(const SourceFn& S, double dt, std::size_t n_steps);
cplx source_from_initial(const InitialData& f0, int k, double t);
// same from a sampled state at t = 0, through the oscillatory moment at a = k t
cplx source_from_initial(const SpectralState& f0, int k, double t);

// rho(t) + int_0^t (t-s) mu_hat(k(t-s)) rho(s) ds = S(t), product trapezoid.
DensityTrace volterra_solve(const Equilibrium& eq, int k, const std::vector<cplx>& S, double dt);
DensityTrace volterra_solve(const Equilibrium& eq, int k, const SourceFn& S, double dt, double T);

struct ResolventOptions {
    double theta_hat = -1.0;  // contour Re lambda = -theta_hat |k|; default min(theta1, theta0/4)
    double omega_max = -1.0;  // default: chosen from the remainder tail estimate
    int n_quad = -1;          // default: omega_max / h with h from the aliasing bound
    int order = 8;            // highest subtracted pole order
    double tol = 1e-11;
};

struct ResolventKernel {
    int k = 1;
    double dt = 0.0;
    std::vector<double> K;  // real for even equilibria
    double theta_hat = 0.0;
    double omega_max = 0.0;
    int n_quad = 0;
    double h = 0.0;
    double tail_estimate = 0.0;
    double pole = 0.0;  // c in the subtracted sum of b_n / (lambda + c)^n
    // envelope |K(t)| <= C_fit e^{-theta_fit |k| t} + noise_floor
    double C_fit = 0.0;
    double theta_fit = 0.0;
    double noise_floor = 0.0;

    double t(std::size_t n) const { return static_cast<double>(n) * dt; }
};

// Inverse Laplace transform of -L/(1+L) along Re lambda = -theta_hat |k|.
// theta1 is the certified strip width; a larger theta_hat is refused.
ResolventKernel resolvent_kernel(const Equilibrium& eq, int k, double theta1, double dt, std::size_t n_steps,
                                 const ResolventOptions& opts = {});

// max_n |K(t_n) + t_n mu_hat(k t_n) + int_0^{t_n} (t_n-s) mu_hat(k(t_n-s)) K(s) ds|, trapezoid in s
double resolvent_identity_residual(const Equilibrium& eq, const ResolventKernel& K);

// Least-squares envelope |K| <= C e^{-theta |k| t}; fills C_fit, theta_fit, noise_floor.
void fit_envelope(ResolventKernel& K);

// rho = S + int_0^t K(t-s) S(s) ds, trapezoid.
DensityTrace solve_via_kernel(const std::vector<cplx>& S, const ResolventKernel& K);

double max_difference(const DensityTrace& a, const DensityTrace& b);

enum class FitMode { Auto, Envelope, Direct };

struct DecayFit {
    double log_amplitude = 0.0;
    double rate = 0.0;
    double residual = 0.0;  // rms of the log residuals
    int points = 0;
    bool envelope = false;
};

// log|E| ~ log A - c t^gamma on [t_a, t_b]. Auto uses the envelope of local
// maxima when gamma == 1 and the trace oscillates (>= 3 maxima in the window).
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& amp, double gamma, double t_a, double t_b,
                   FitMode mode = FitMode::Auto);
DecayFit fit_decay(const DensityTrace& tr, double gamma, double t_a, double t_b, FitMode mode = FitMode::Auto);

}  // namespace landau::linear
