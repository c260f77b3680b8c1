#include "landau/equilibria.hpp"

#include "landau/errors.hpp"
#include "landau/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace landau {
namespace {

double gauss(double v, double vt) {
    return std::exp(-0.5 * v * v / (vt * vt)) / (std::sqrt(2.0 * pi) * vt);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

cplx transform_quad(const Equilibrium& eq, double eta, bool weighted) {
    // beams sit at +-u with width v_t; 40 widths past them mu is below 1e-300
    const double L = eq.u() + 40.0 * eq.v_t();
    quad::AdaptiveOptions opts;
    opts.abs_tol = 1e-15;
    opts.initial_width = std::min(0.5 * eq.v_t(), eta != 0.0 ? 1.0 / std::abs(eta) : 1.0);
    auto f = [&](double v) {
        const double w = weighted ? 1.0 + v * v : 1.0;
        return w * eq.mu(v) * std::polar(1.0, -eta * v);
    };
    return quad::integrate(f, -L, L, opts).value;
}

}  // namespace

Equilibrium::Equilibrium(Kind kind, std::string name, double u, double vt)
    : kind_(kind), name_(std::move(name)), u_(u), vt_(vt) {
    if (kind == Kind::Free) {
        c0_ = 1.0;
        theta0_ = 1.0;
    } else {
        // cos(u eta) e^{-vt^2 eta^2/2} <= e^{1/2 - vt |eta|} since (vt|eta| - 1)^2 >= 0
        c0_ = std::exp(0.5);
        theta0_ = vt;
    }
}

Equilibrium Equilibrium::gaussian() { return Equilibrium(Kind::Gaussian, "gaussian", 0.0, 1.0); }

Equilibrium Equilibrium::two_stream(double u, double v_t) {
    if (!(u >= 0.0)) throw DomainError("two_stream: u must be >= 0");
    if (!(v_t > 0.0)) throw DomainError("two_stream: v_t must be > 0");
    return Equilibrium(Kind::TwoStream, "two_stream", u, v_t);
}

Equilibrium Equilibrium::free() { return Equilibrium(Kind::Free, "free", 0.0, 1.0); }

double Equilibrium::mu(double v) const {
    if (is_free()) return 0.0;
    return 0.5 * (gauss(v - u_, vt_) + gauss(v + u_, vt_));
}

double Equilibrium::dmu(double v) const {
    if (is_free()) return 0.0;
    const double a = vt_ * vt_;
    return -0.5 * ((v - u_) * gauss(v - u_, vt_) + (v + u_) * gauss(v + u_, vt_)) / a;
}

double Equilibrium::mu_hat(double eta) const {
    if (is_free()) return 0.0;
    return std::cos(u_ * eta) * std::exp(-0.5 * vt_ * vt_ * eta * eta);
}

double Equilibrium::mu_hat_d1(double eta) const {
    if (is_free()) return 0.0;
    const double a = vt_ * vt_;
    const double h = std::exp(-0.5 * a * eta * eta);
    return -h * (u_ * std::sin(u_ * eta) + a * eta * std::cos(u_ * eta));
}

double Equilibrium::mu_hat_d2(double eta) const {
    if (is_free()) return 0.0;
    const double a = vt_ * vt_;
    const double h = std::exp(-0.5 * a * eta * eta);
    const double c = std::cos(u_ * eta);
    const double s = std::sin(u_ * eta);
    return h * (c * (a * a * eta * eta - a - u_ * u_) + 2.0 * a * u_ * eta * s);
}

double Equilibrium::mu_hat_taylor(int n) const {
    if (is_free() || n % 2) return 0.0;
    // E[(u + v_t Z)^n] for the beam at +u; the -u beam gives the same even moments
    double m = 0.0;
    double dfact = 1.0;  // (2i - 1)!!
    for (int i = 0; 2 * i <= n; ++i) {
        if (i > 0) dfact *= 2.0 * i - 1.0;
        m += binom(n, 2 * i) * std::pow(u_, n - 2 * i) * std::pow(vt_, 2 * i) * dfact;
    }
    return (n % 4 == 0) ? m : -m;
}

double Equilibrium::moment_hat(double eta) const {
    return mu_hat(eta) - mu_hat_d2(eta);
}

cplx mu_hat_quadrature(const Equilibrium& eq, double eta) {
    if (eq.is_free()) return 0.0;
    return transform_quad(eq, eta, false);
}

cplx moment_hat_quadrature(const Equilibrium& eq, double eta) {
    if (eq.is_free()) return 0.0;
    return transform_quad(eq, eta, true);
}

DecayReport verify_decay(const Equilibrium& eq, double eta_max, int n_samples) {
    if (!(eta_max > 0.0) || n_samples < 2) throw DomainError("verify_decay: need eta_max > 0 and n_samples >= 2");
    DecayReport r;
    const double th = eq.theta0();
    for (int i = 0; i < n_samples; ++i) {
        const double eta = eta_max * i / (n_samples - 1);
        const double env = std::exp(th * eta);
        const double q = std::abs(eq.mu_hat(eta)) * env / eq.C0();
        if (q > r.max_ratio) {
            r.max_ratio = q;
            r.worst_eta = eta;
        }
        const double mq = std::abs(eq.moment_hat(eta)) * env;
        if (mq > r.moment_c0) {
            r.moment_c0 = mq;
            r.moment_worst_eta = eta;
        }
    }
    r.moment_ratio = r.moment_c0 / eq.C0();
    // quadrature cross-check on a coarser subset; the transforms are below
    // the quadrature floor well before eta = 40 so larger eta add nothing
    const int nq = std::min(n_samples, 81);
    for (int i = 0; i < nq; ++i) {
        const double eta = eta_max * i / (nq - 1);
        const double d = std::abs(moment_hat_quadrature(eq, eta) - eq.moment_hat(eta));
        r.quadrature_mismatch = std::max(r.quadrature_mismatch, d);
    }
    return r;
}

}  // namespace landau
