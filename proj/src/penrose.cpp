#include "landau/penrose.hpp"

#include "landau/errors.hpp"
#include "landau/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace landau::penrose {
namespace {

constexpr double contour_floor = 1e-8;

// Asymptotic series L ~ sum_n h^(n)(0) / lambda^{n+1}, h(t) = t mu_hat(k t),
// h^(n)(0) = n k^{n-1} mu_hat^(n-1)(0). Returns false if the terms do not
// get below the target before they start to grow.
bool asymptotic_symbol(const Equilibrium& eq, double k, cplx lambda, cplx& out) {
    const double scale = eq.u() + eq.v_t();
    if (std::abs(lambda) < 20.0 * k * scale) return false;
    cplx sum{0.0, 0.0};
    cplx inv_pow = 1.0 / (lambda * lambda);  // 1/lambda^{n+1} at n = 1
    const cplx inv = 1.0 / lambda;
    double kpow = 1.0;  // k^{n-1}
    double last = HUGE_VAL;
    for (int n = 1; n <= 81; n += 1) {
        const double h = n * kpow * eq.mu_hat_taylor(n - 1);
        if (h != 0.0) {
            const cplx term = h * inv_pow;
            const double a = std::abs(term);
            if (a > last) return false;
            sum += term;
            last = a;
            if (a < 1e-17) {
                out = sum;
                return true;
            }
        }
        inv_pow *= inv;
        kpow *= k;
    }
    return false;
}

double gaussian_cut(const Equilibrium& eq, double theta) {
    // every family member is bounded by polynomial * e^{-v_t^2 s^2 / 2}; past
    // this point e^{theta s - v_t^2 s^2/2} < e^{-80}
    const double a = eq.v_t() * eq.v_t();
    return (theta + std::sqrt(theta * theta + 160.0 * a)) / a + eq.u();
}

}  // namespace

double truncation_time(const Equilibrium& eq, int k, cplx lambda, double tol) {
    const double r = lambda.real() + eq.theta0() * std::abs(k);
    if (!(r > 0.0)) throw DomainError("laplace_symbol: Re lambda must exceed -theta0 |k|");
    auto tail = [&](double T) { return eq.C0() * std::exp(-r * T) * (T / r + 1.0 / (r * r)); };
    double hi = 1.0 / r;
    while (tail(hi) >= tol) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) < tol ? hi : lo) = mid;
    }
    return hi;
}

cplx laplace_symbol(const Equilibrium& eq, int k, cplx lambda) {
    if (k == 0) throw DomainError("laplace_symbol: k must be nonzero");
    const double kk = std::abs(k);
    if (!(lambda.real() > -eq.theta0() * kk)) {
        std::ostringstream msg;
        msg << "laplace_symbol: Re lambda = " << lambda.real() << " outside convergence region Re lambda > "
            << -eq.theta0() * kk;
        throw DomainError(msg.str());
    }
    if (eq.is_free()) return 0.0;
    cplx out;
    if (asymptotic_symbol(eq, kk, lambda, out)) return out;

    const double T = truncation_time(eq, k, lambda);
    quad::AdaptiveOptions opts;
    opts.abs_tol = 1e-16;
    opts.rel_tol = 1e-15;
    // panels about one Gaussian width of mu_hat(k t) and a few oscillations long
    opts.initial_width = 1.0 / (kk * eq.v_t());
    const double osc = std::abs(lambda.imag()) + eq.u() * kk;
    if (osc > 0.0) opts.initial_width = std::min(opts.initial_width, 4.0 / osc);
    // mu_hat underflows to 0 long before e^{-lambda t} overflows when Re lambda < 0
    auto f = [&](double t) -> cplx {
        const double m = eq.mu_hat(kk * t);
        return m == 0.0 ? cplx{} : t * m * std::exp(-lambda * t);
    };
    return quad::integrate(f, 0.0, T, opts).value;
}

cplx dispersion(const Equilibrium& eq, int k, cplx lambda) { return 1.0 + laplace_symbol(eq, k, lambda); }

SymbolBounds symbol_bounds(const Equilibrium& eq, double theta) {
    SymbolBounds b;
    b.theta = theta;
    if (eq.is_free()) return b;
    const double S = gaussian_cut(eq, theta);
    quad::AdaptiveOptions opts;
    opts.abs_tol = 1e-12;
    opts.initial_width = 0.25 / std::max(1.0, eq.u());
    b.A = quad::integrate_real([&](double s) { return s * std::exp(theta * s) * std::abs(eq.mu_hat(s)); }, 0.0, S,
                               opts);
    b.B = quad::integrate_real(
        [&](double s) {
            return std::exp(theta * s) * (2.0 * std::abs(eq.mu_hat_d1(s)) + s * std::abs(eq.mu_hat_d2(s)));
        },
        0.0, S, opts);
    const double m0 = std::abs(eq.mu_hat(0.0));
    b.C1 = 3.0 * std::max(b.A, m0 + b.B);
    b.k_tail = std::max(1, static_cast<int>(std::ceil(std::sqrt(2.0 * b.A))));
    b.im_bound = std::sqrt(2.0 * (m0 + b.B));
    return b;
}

Winding winding(const Equilibrium& eq, int k, const Rect& rect) {
    const double kk = std::abs(k);
    if (!(rect.re_hi > rect.re_lo) || !(rect.im_hi > rect.im_lo))
        throw DomainError("count_zeros: degenerate rectangle");
    if (!(rect.re_lo > -eq.theta0() * kk)) throw DomainError("count_zeros: rectangle leaves convergence region");

    const cplx corners[5] = {{rect.re_lo, rect.im_lo},
                             {rect.re_hi, rect.im_lo},
                             {rect.re_hi, rect.im_hi},
                             {rect.re_lo, rect.im_hi},
                             {rect.re_lo, rect.im_lo}};
    const double h0 = 0.25 * kk * eq.v_t();

    auto trace = [&](int refine, Winding& w) {
        double total = 0.0;
        auto eval = [&](cplx z) {
            const cplx d = dispersion(eq, k, z);
            ++w.evaluations;
            const double a = std::abs(d);
            w.min_abs_d = std::min(w.min_abs_d, a);
            if (a < contour_floor) {
                std::ostringstream msg;
                msg << "count_zeros: |D| = " << a << " at lambda = " << z.real() << (z.imag() < 0 ? "" : "+")
                    << z.imag() << "i on the contour; perturb the rectangle";
                throw DomainError(msg.str());
            }
            return d;
        };
        auto segment = [&](auto&& self, cplx za, cplx da, cplx zb, cplx db, int depth) -> double {
            const double darg = std::arg(db / da);
            if (std::abs(darg) <= pi / 8 || depth >= 40) return darg;
            const cplx zm = 0.5 * (za + zb);
            const cplx dm = eval(zm);
            return self(self, za, da, zm, dm, depth + 1) + self(self, zm, dm, zb, db, depth + 1);
        };
        cplx za = corners[0];
        cplx da = eval(za);
        for (int e = 0; e < 4; ++e) {
            const cplx a = corners[e];
            const cplx b = corners[e + 1];
            const int n = refine * std::max(16, static_cast<int>(std::ceil(std::abs(b - a) / h0)));
            for (int i = 1; i <= n; ++i) {
                const cplx zb = (i == n) ? b : a + (b - a) * (static_cast<double>(i) / n);
                const cplx db = eval(zb);
                total += segment(segment, za, da, zb, db, 0);
                za = zb;
                da = db;
            }
        }
        return total / (2.0 * pi);
    };

    Winding w;
    w.k = k;
    w.rect = rect;
    w.min_abs_d = HUGE_VAL;
    double prev = trace(1, w);
    for (int refine = 2; refine <= 16; refine *= 2) {
        const double cur = trace(refine, w);
        if (std::lround(cur) == std::lround(prev)) {
            w.raw = cur;
            w.count = static_cast<int>(std::lround(cur));
            if (std::abs(cur - w.count) >= 0.1) throw ConvergenceError("count_zeros: winding number not integral");
            return w;
        }
        prev = cur;
    }
    throw ConvergenceError("count_zeros: contour refinement did not settle");
}

Root find_root(const Equilibrium& eq, int k, cplx seed) {
    const double kk = std::abs(k);
    // keep a small band off the boundary, where the symbol's truncation time
    // (and so the quadrature cost) blows up like 1 / (Re lambda + theta0 |k|)
    const double left = -0.98 * eq.theta0() * kk;
    if (!(seed.real() > -eq.theta0() * kk)) throw DomainError("find_root: seed outside convergence region");
    if (!(seed.real() > left)) throw ConvergenceError("find_root: seed too close to the analyticity boundary");
    const double h = 1e-3 * kk;
    cplx z = seed;
    cplx d = dispersion(eq, k, z);
    Root r;
    r.k = k;
    for (int it = 1; it <= 50; ++it) {
        r.iterations = it;
        if (std::abs(d) < 1e-14) break;
        if (z.real() - h <= left) throw ConvergenceError("find_root: iterate left the analyticity region");
        const cplx I1{0.0, 1.0};
        const cplx deriv = (dispersion(eq, k, z + h) - dispersion(eq, k, z - h) - I1 * dispersion(eq, k, z + I1 * h) +
                            I1 * dispersion(eq, k, z - I1 * h)) /
                           (4.0 * h);
        if (!(std::abs(deriv) > 0.0) || !std::isfinite(std::abs(deriv)))
            throw ConvergenceError("find_root: vanishing derivative, D has no zero nearby");
        cplx step = d / deriv;
        cplx zn;
        cplx dn;
        bool accepted = false;
        for (int half = 0; half < 20; ++half) {
            zn = z - step;
            if (zn.real() > left) {
                dn = dispersion(eq, k, zn);
                if (std::abs(dn) < std::abs(d) || std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const bool tiny = std::abs(z - zn) < 1e-15 * std::max(1.0, std::abs(z));
        z = zn;
        d = dn;
        if (tiny) break;
    }
    r.lambda = z;
    r.residual = std::abs(d);
    if (!(r.residual < 1e-10)) {
        std::ostringstream msg;
        msg << "find_root: no convergence for k=" << k << " (|D| = " << r.residual << " after " << r.iterations
            << " iterations)";
        throw ConvergenceError(msg.str());
    }
    return r;
}

cplx coarse_seed(const Equilibrium& eq, int k, const Rect& rect, int n) {
    double best = HUGE_VAL;
    cplx arg = {rect.re_hi, rect.im_hi};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx z{rect.re_lo + (rect.re_hi - rect.re_lo) * i / (n - 1),
                         rect.im_lo + (rect.im_hi - rect.im_lo) * j / (n - 1)};
            const double a = std::abs(dispersion(eq, k, z));
            if (a < best) {
                best = a;
                arg = z;
            }
        }
    }
    return arg;
}

namespace {

// A zero certified inside `rect` (Re lambda >= 0): Newton from the coarse
// minimum of |D|, then from points on the real axis where symmetric beams
// grow. Returns nothing if every seed fails; the winding count still stands.
std::optional<Root> unstable_root(const Equilibrium& eq, int k, const Rect& rect) {
    std::vector<cplx> seeds{coarse_seed(eq, k, rect, 41)};
    for (int i = 1; i <= 8; ++i) seeds.emplace_back(rect.re_hi * i / 9.0, 0.0);
    seeds.push_back(coarse_seed(eq, k, Rect{rect.re_lo, rect.re_hi, 0.0, rect.im_hi}, 81));
    for (const cplx& s : seeds) {
        try {
            const Root r = find_root(eq, k, s);
            if (r.lambda.real() > 0.0) return r;
        } catch (const ConvergenceError&) {
        }
    }
    return std::nullopt;
}

}  // namespace

MarginResult margin(const Equilibrium& eq, int k_max_scan, double omega_max, int n_omega) {
    if (k_max_scan < 1 || !(omega_max > 0.0) || n_omega < 3) throw DomainError("margin: bad scan parameters");
    MarginResult m;
    if (eq.is_free()) {
        m.kappa0 = m.scan_min = 1.0;
        return m;
    }
    const SymbolBounds b = symbol_bounds(eq, 0.0);
    m.C1 = b.C1;

    // zero-freeness of Re lambda >= 0; for k^2 > A there is nothing to certify
    const double R = 1.25 * std::sqrt(std::abs(eq.mu_hat(0.0)) + b.B) + 0.5;
    const int k_cert = static_cast<int>(std::floor(std::sqrt(b.A)));
    bool zeros = false;
    for (int k = 1; k <= k_cert; ++k) {
        const double kr = R;
        Rect rect{0.0, kr, -kr, kr};
        Winding w = winding(eq, k, rect);
        m.windings.push_back(w);
        if (w.count > 0) {
            zeros = true;
            if (!m.unstable) m.unstable = unstable_root(eq, k, rect);
        }
    }

    std::vector<double> kmin(k_max_scan, HUGE_VAL);
    std::vector<double> wmin(k_max_scan, 0.0);
    const double dw = omega_max / (n_omega - 1);
#pragma omp parallel for schedule(dynamic)
    for (int k = 1; k <= k_max_scan; ++k) {
        int best_i = 0;
        double best = HUGE_VAL;
        for (int i = 0; i < n_omega; ++i) {
            const double a = std::abs(dispersion(eq, k, cplx{0.0, i * dw}));
            if (a < best) {
                best = a;
                best_i = i;
            }
        }
        // golden-section refinement around the grid minimum
        double lo = std::max(0.0, (best_i - 1) * dw);
        double hi = std::min(omega_max, (best_i + 1) * dw);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        auto f = [&](double w) { return std::abs(dispersion(eq, k, cplx{0.0, w})); };
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2);
            }
        }
        double w_ref = best_i * dw;
        if (std::min(f1, f2) < best) {
            best = std::min(f1, f2);
            w_ref = f1 < f2 ? x1 : x2;
        }
        kmin[k - 1] = best;
        wmin[k - 1] = w_ref;
    }
    m.scan_min = HUGE_VAL;
    for (int k = 1; k <= k_max_scan; ++k) {
        if (kmin[k - 1] < m.scan_min) {
            m.scan_min = kmin[k - 1];
            m.k_min = k;
            m.omega_min = wmin[k - 1];
        }
    }
    const double kn = k_max_scan + 1.0;
    m.tail_k = std::max(0.0, 1.0 - b.A / (kn * kn));
    m.tail_omega = std::max(0.0, 1.0 - (std::abs(eq.mu_hat(0.0)) + b.B) / (omega_max * omega_max));
    m.kappa0 = zeros ? 0.0 : std::min({m.scan_min, m.tail_k, m.tail_omega});
    return m;
}

StripResult strip_width(const Equilibrium& eq, int k_max_scan) {
    StripResult res;
    const double top = 0.5 * eq.theta0();
    if (eq.is_free()) {
        res.theta1 = top;
        return res;
    }
    const MarginResult m = margin(eq, k_max_scan, 50.0, 501);
    if (m.unstable || !(m.kappa0 > 0.0)) {
        std::ostringstream msg;
        msg << "strip_width: Penrose margin vanishes";
        if (m.unstable)
            msg << " (k=" << m.unstable->k << ", root " << m.unstable->lambda.real() << "+" << m.unstable->lambda.imag()
                << "i)";
        throw StabilityError(msg.str(), 0.0);
    }

    auto test = [&](double theta, std::vector<Winding>* out) {
        const SymbolBounds b = symbol_bounds(eq, theta);
        const int kmax = std::max(1, b.k_tail - 1);
        const double W = b.im_bound + 0.5;
        for (int k = 1; k <= kmax; ++k) {
            Rect rect{-theta * k, 0.0, -W, W};
            try {
                Winding w = winding(eq, k, rect);
                if (out) out->push_back(w);
                if (w.count != 0) return false;
            } catch (const DomainError&) {
                return false;  // a zero sits on the contour
            }
        }
        return true;
    };

    if (test(top, nullptr)) {
        res.theta1 = top;
    } else {
        double lo = 0.0, hi = top;
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            (test(mid, nullptr) ? lo : hi) = mid;
            ++res.bisection_steps;
        }
        if (!(lo > 0.0)) throw StabilityError("strip_width: no zero-free strip found", 0.0);
        res.theta1 = lo;
    }
    test(res.theta1, &res.windings);
    const SymbolBounds b = symbol_bounds(eq, res.theta1);
    res.k_tail = b.k_tail;
    res.C1 = b.C1;
    return res;
}

}  // namespace landau::penrose
