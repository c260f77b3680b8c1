#include "landau/linear.hpp"

#include "landau/errors.hpp"
#include "landau/penrose.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace landau::linear {
namespace {

std::vector<double> memory_kernel(const Equilibrium& eq, int k, double dt, std::size_t n) {
    std::vector<double> ker(n, 0.0);
    if (eq.is_free()) return ker;
    for (std::size_t m = 1; m < n; ++m) {
        const double t = static_cast<double>(m) * dt;
        ker[m] = t * eq.mu_hat(k * t);
    }
    return ker;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct Peak {
    double t;
    double log_amp;
};

// local maxima of amp with a parabola through the three log values
std::vector<Peak> local_maxima(const std::vector<double>& t, const std::vector<double>& amp, double floor) {
    std::vector<Peak> out;
    for (std::size_t i = 1; i + 1 < amp.size(); ++i) {
        if (!(amp[i] >= amp[i - 1] && amp[i] > amp[i + 1]) || !(amp[i] > floor) || !(amp[i - 1] > 0.0) ||
            !(amp[i + 1] > 0.0))
            continue;
        const double y0 = std::log(amp[i - 1]), y1 = std::log(amp[i]), y2 = std::log(amp[i + 1]);
        const double den = y0 - 2.0 * y1 + y2;
        double off = 0.0, y = y1;
        if (den < 0.0) {
            off = 0.5 * (y0 - y2) / den;
            y = y1 - 0.25 * (y0 - y2) * off;
        }
        const double step = 0.5 * (t[i + 1] - t[i - 1]);
        out.push_back({t[i] + off * step, y});
    }
    return out;
}

void least_squares(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& icept,
                   double& rms) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    slope = sxx > 0.0 ? sxy / sxx : 0.0;
    icept = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (icept + slope * x[i]);
        ss += r * r;
    }
    rms = std::sqrt(ss / n);
}

}  // namespace

std::vector<double> DensityTrace::times() const {
    std::vector<double> out(rho.size());
    for (std::size_t n = 0; n < rho.size(); ++n) out[n] = t(n);
    return out;
}

std::vector<double> DensityTrace::abs_E() const {
    std::vector<double> out(rho.size());
    for (std::size_t n = 0; n < rho.size(); ++n) out[n] = std::abs(E(n));
    return out;
}

std::size_t step_count(double dt, double T) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw DomainError("time grid: need dt > 0 and T >= 0");
    const double q = T / dt;
    const double n = std::round(q);
    if (std::abs(q - n) > 1e-9 * std::max(1.0, q)) throw DomainError("time grid: T/dt must be an integer");
    if (n > 1e7) throw DomainError("time grid: more than 1e7 steps");
    return static_cast<std::size_t>(n);
}

std::vector<cplx> sample_source(const SourceFn& S, double dt, std::size_t n_steps) {
    std::vector<cplx> out(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) out[n] = S(static_cast<double>(n) * dt);
    return out;
}

cplx source_from_initial(const InitialData& f0, int k, double t) { return f0.source(k, t); }

cplx source_from_initial(const SpectralState& f0, int k, double t) {
    return spectral::oscillatory_moment(f0, k, k * t);
}

DensityTrace volterra_solve(const Equilibrium& eq, int k, const std::vector<cplx>& S, double dt) {
    if (k == 0) throw DomainError("volterra_solve: k must be nonzero");
    if (!(dt > 0.0)) throw DomainError("volterra_solve: dt must be positive");
    DensityTrace tr;
    tr.k = k;
    tr.dt = dt;
    const std::size_t n = S.size();
    tr.rho.assign(n, cplx{0.0, 0.0});
    if (n == 0) return tr;
    const std::vector<double> ker = memory_kernel(eq, k, dt, n);
    // the kernel vanishes at zero lag, so every step is explicit
    tr.rho[0] = S[0];
    for (std::size_t i = 1; i < n; ++i) {
        double re = 0.5 * ker[i] * tr.rho[0].real();
        double im = 0.5 * ker[i] * tr.rho[0].imag();
        for (std::size_t j = 1; j < i; ++j) {
            re += ker[i - j] * tr.rho[j].real();
            im += ker[i - j] * tr.rho[j].imag();
        }
        tr.rho[i] = S[i] - dt * cplx{re, im};
    }
    return tr;
}

DensityTrace volterra_solve(const Equilibrium& eq, int k, const SourceFn& S, double dt, double T) {
    return volterra_solve(eq, k, sample_source(S, dt, step_count(dt, T)), dt);
}

ResolventKernel resolvent_kernel(const Equilibrium& eq, int k, double theta1, double dt, std::size_t n_steps,
                                 const ResolventOptions& opts) {
    if (k == 0) throw DomainError("resolvent_kernel: k must be nonzero");
    ResolventKernel rk;
    rk.k = k;
    rk.dt = dt;
    rk.K.assign(n_steps + 1, 0.0);
    const double kk = std::abs(k);
    const double th = opts.theta_hat > 0.0 ? opts.theta_hat : std::min(theta1, 0.25 * eq.theta0());
    if (th > theta1 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "resolvent_kernel: contour theta " << th << " exceeds the certified strip " << theta1;
        throw DomainError(msg.str());
    }
    if (!(th > 0.0) || th >= eq.theta0()) throw DomainError("resolvent_kernel: contour outside convergence region");
    rk.theta_hat = th;
    if (eq.is_free()) return rk;

    const int J = std::max(2, opts.order);
    const double c0 = th * kk;
    const double scale = eq.u() + eq.v_t();
    const double c = c0 + kk * scale;
    rk.pole = c;

    // 1/lambda expansion of L: coefficient of lambda^{-(n+1)} is n k^{n-1} mu_hat^{(n-1)}(0)
    std::vector<double> ell(J + 1, 0.0), r(J + 1, 0.0);
    double kp = 1.0;
    for (int n = 1; n + 1 <= J; ++n) {
        ell[n + 1] = n * kp * eq.mu_hat_taylor(n - 1);
        kp *= kk;
    }
    // r = -ell / (1 + ell) as power series in 1/lambda
    for (int m = 0; m <= J; ++m) {
        double s = -ell[m];
        for (int i = 1; i <= m; ++i) s -= ell[i] * r[m - i];
        r[m] = s;
    }
    // re-expand around the pole -c
    std::vector<double> b(J + 1, 0.0);
    for (int n = 2; n <= J; ++n)
        for (int j = 2; j <= n; ++j) b[n] += r[j] * binom(n - 1, j - 1) * std::pow(c, n - j);

    auto remainder = [&](double w) {
        const cplx lam{-c0, w};
        const cplx L = penrose::laplace_symbol(eq, k, lam);
        cplx phi{0.0, 0.0};
        const cplx inv = 1.0 / (lam + c);
        cplx p = inv * inv;
        for (int n = 2; n <= J; ++n) {
            phi += b[n] * p;
            p *= inv;
        }
        return -L / (1.0 + L) - phi;
    };

    const double t_max = static_cast<double>(n_steps) * dt;
    const double gap = std::max(theta1 - th, 0.1 * theta1) * kk;
    const double period = t_max + 30.0 / gap;
    rk.h = 2.0 * pi / period;

    if (opts.omega_max > 0.0) {
        rk.omega_max = opts.omega_max;
    } else {
        double W = std::max(20.0 * kk * scale, 10.0);
        for (int it = 0; it < 60; ++it) {
            const double tail = std::abs(remainder(W)) * W / (J * pi);
            if (tail < opts.tol) break;
            W *= 1.5;
        }
        rk.omega_max = W;
    }
    rk.tail_estimate = std::abs(remainder(rk.omega_max)) * rk.omega_max / (J * pi);
    rk.n_quad = opts.n_quad > 0 ? opts.n_quad : static_cast<int>(std::ceil(rk.omega_max / rk.h));
    const double hq = rk.omega_max / rk.n_quad;
    rk.h = hq;

    const int M = rk.n_quad;
    std::vector<cplx> R(M + 1);
#pragma omp parallel for schedule(dynamic, 16)
    for (int m = 0; m <= M; ++m) R[m] = remainder(m * hq);
    R[0] *= 0.5;

    std::vector<double> acc(n_steps + 1, 0.0);
    for (int m = 0; m <= M; ++m) {
        const cplx lam{-c0, m * hq};
        const cplx z = std::exp(lam * dt);
        cplx p{1.0, 0.0};
        for (std::size_t n = 0; n <= n_steps; ++n) {
            if (n % 256 == 0) p = std::exp(lam * (static_cast<double>(n) * dt));
            acc[n] += (R[m] * p).real();
            p *= z;
        }
    }
    std::vector<double> fact(J + 1, 1.0);
    for (int n = 1; n <= J; ++n) fact[n] = fact[n - 1] * n;
    for (std::size_t n = 0; n <= n_steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        double phi = 0.0;
        double tp = t;  // t^{n-1} for n = 2
        for (int q = 2; q <= J; ++q) {
            phi += b[q] * tp / fact[q - 1];
            tp *= t;
        }
        rk.K[n] = phi * std::exp(-c * t) + hq / pi * acc[n];
    }
    fit_envelope(rk);
    return rk;
}

double resolvent_identity_residual(const Equilibrium& eq, const ResolventKernel& K) {
    const std::size_t n = K.K.size();
    const std::vector<double> ker = memory_kernel(eq, K.k, K.dt, n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        if (i > 0) {
            s = 0.5 * ker[i] * K.K[0];
            for (std::size_t j = 1; j < i; ++j) s += ker[i - j] * K.K[j];
        }
        worst = std::max(worst, std::abs(K.K[i] + ker[i] + K.dt * s));
    }
    return worst;
}

void fit_envelope(ResolventKernel& K) {
    const std::size_t n = K.K.size();
    std::vector<double> t(n), a(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = K.t(i);
        a[i] = std::abs(K.K[i]);
        peak = std::max(peak, a[i]);
    }
    K.noise_floor = std::max(10.0 * K.tail_estimate, 1e-12 * peak);
    K.C_fit = 0.0;
    K.theta_fit = 0.0;
    if (peak == 0.0) return;
    std::vector<Peak> pk = local_maxima(t, a, K.noise_floor);
    std::vector<double> x, y;
    if (pk.size() >= 3) {
        for (const Peak& p : pk) {
            x.push_back(p.t);
            y.push_back(p.log_amp);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > K.noise_floor) {
                x.push_back(t[i]);
                y.push_back(std::log(a[i]));
            }
    }
    double slope = 0.0, icept = 0.0, rms = 0.0;
    if (x.size() >= 2) least_squares(x, y, slope, icept, rms);
    const double kk = std::abs(K.k);
    K.theta_fit = -slope / kk;
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] > K.noise_floor) K.C_fit = std::max(K.C_fit, a[i] * std::exp(K.theta_fit * kk * t[i]));
}

DensityTrace solve_via_kernel(const std::vector<cplx>& S, const ResolventKernel& K) {
    if (S.size() != K.K.size()) throw DomainError("solve_via_kernel: source and kernel grids differ");
    DensityTrace tr;
    tr.k = K.k;
    tr.dt = K.dt;
    const std::size_t n = S.size();
    tr.rho.assign(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        double re = 0.0, im = 0.0;
        if (i > 0) {
            re = 0.5 * (K.K[i] * S[0].real() + K.K[0] * S[i].real());
            im = 0.5 * (K.K[i] * S[0].imag() + K.K[0] * S[i].imag());
            for (std::size_t j = 1; j < i; ++j) {
                re += K.K[i - j] * S[j].real();
                im += K.K[i - j] * S[j].imag();
            }
        }
        tr.rho[i] = S[i] + K.dt * cplx{re, im};
    }
    return tr;
}

double max_difference(const DensityTrace& a, const DensityTrace& b) {
    if (a.size() != b.size()) throw DomainError("max_difference: traces differ in length");
    double d = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a.rho[n] - b.rho[n]));
    return d;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& amp, double gamma, double t_a,
                   double t_b, FitMode mode) {
    if (t.size() != amp.size()) throw DomainError("fit_decay: size mismatch");
    constexpr double floor = 1e-14;
    std::vector<Peak> pk;
    for (const Peak& p : local_maxima(t, amp, floor))
        if (p.t >= t_a && p.t <= t_b) pk.push_back(p);
    bool env = mode == FitMode::Envelope || (mode == FitMode::Auto && gamma == 1.0 && pk.size() >= 3);
    std::vector<double> x, y;
    if (env) {
        for (const Peak& p : pk) {
            x.push_back(std::pow(p.t, gamma));
            y.push_back(p.log_amp);
        }
    } else {
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= t_a && t[i] <= t_b && amp[i] > floor) {
                x.push_back(std::pow(t[i], gamma));
                y.push_back(std::log(amp[i]));
            }
    }
    if (x.size() < 8) {
        std::ostringstream msg;
        msg << "fit_decay: only " << x.size() << " usable points in [" << t_a << ", " << t_b << "]";
        throw DomainError(msg.str());
    }
    DecayFit f;
    double slope = 0.0;
    least_squares(x, y, slope, f.log_amplitude, f.residual);
    f.rate = -slope;
    f.points = static_cast<int>(x.size());
    f.envelope = env;
    return f;
}

DecayFit fit_decay(const DensityTrace& tr, double gamma, double t_a, double t_b, FitMode mode) {
    return fit_decay(tr.times(), tr.abs_E(), gamma, t_a, t_b, mode);
}

}  // namespace landau::linear
