#pragma once

#include "landau/types.hpp"

#include <string>

namespace landau {

// Homogeneous background mu(v) with closed-form transform
// mu_hat(eta) = int e^{-i eta v} mu(v) dv.
//
// All members are symmetric two-beam Gaussians
//   mu = 1/2 [M(v - u) + M(v + u)],   M(v) = e^{-v^2 / (2 v_t^2)} / (sqrt(2 pi) v_t),
// so mu_hat(eta) = cos(u eta) e^{-v_t^2 eta^2 / 2} is real and even.
// The "free" stub has mu = 0 and switches the mean-field coupling off.
class Equilibrium {
public:
    enum class Kind { Gaussian, TwoStream, Free };

    static Equilibrium gaussian();
    static Equilibrium two_stream(double u, double v_t = 1.0);
    static Equilibrium free();

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double u() const { return u_; }
    double v_t() const { return vt_; }
    double C0() const { return c0_; }
    double theta0() const { return theta0_; }
    bool is_free() const { return kind_ == Kind::Free; }

    double mu(double v) const;
    double dmu(double v) const;
    double mu_hat(double eta) const;
    double mu_hat_d1(double eta) const;
    double mu_hat_d2(double eta) const;
    // n-th derivative of mu_hat at 0, i.e. (-i)^n E[v^n]; real for even n, zero for odd n
    double mu_hat_taylor(int n) const;
    // transform of (1 + v^2) mu
    double moment_hat(double eta) const;

private:
    Equilibrium(Kind kind, std::string name, double u, double vt);

    Kind kind_;
    std::string name_;
    double u_;
    double vt_;
    double c0_;
    double theta0_;
};

struct DecayReport {
    double max_ratio = 0.0;          // max |mu_hat| e^{theta0 |eta|} / C0
    double worst_eta = 0.0;
    double moment_ratio = 0.0;       // same for the (1 + v^2) mu transform
    double moment_worst_eta = 0.0;
    double moment_c0 = 0.0;          // smallest constant making the moment bound hold
    double quadrature_mismatch = 0.0;  // closed form vs quadrature, moment transform
    bool ok() const { return max_ratio <= 1.0; }
};

// Samples eta in [0, eta_max] (both transforms are even).
DecayReport verify_decay(const Equilibrium& eq, double eta_max, int n_samples);

// int e^{-i eta v} mu(v) dv and the same for (1 + v^2) mu, by adaptive quadrature.
cplx mu_hat_quadrature(const Equilibrium& eq, double eta);
cplx moment_hat_quadrature(const Equilibrium& eq, double eta);

}  // namespace landau
