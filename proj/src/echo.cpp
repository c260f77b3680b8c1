#include "landau/echo.hpp"

#include "landau/errors.hpp"
#include "landau/nonlinear.hpp"
#include "landau/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace landau::echo {
namespace {

struct Max {
    double t;
    double amp;
};

// interior local maxima, refined by a parabola through log|.|
std::vector<Max> maxima(const std::vector<double>& a, double dt, double floor) {
    std::vector<Max> out;
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        if (!(a[i] >= a[i - 1] && a[i] > a[i + 1]) || !(a[i] > floor) || a[i - 1] <= 0.0 || a[i + 1] <= 0.0)
            continue;
        const double y0 = std::log(a[i - 1]), y1 = std::log(a[i]), y2 = std::log(a[i + 1]);
        const double den = y0 - 2.0 * y1 + y2;
        double off = 0.0, y = y1;
        if (den < 0.0) {
            off = 0.5 * (y0 - y2) / den;
            y = y1 - 0.25 * (y0 - y2) * off;
        }
        out.push_back({(static_cast<double>(i) + off) * dt, std::exp(y)});
    }
    return out;
}

const Max* nearest(const std::vector<Max>& m, double t) {
    const Max* best = nullptr;
    for (const Max& x : m)
        if (!best || std::abs(x.t - t) < std::abs(best->t - t)) best = &x;
    return best;
}

}  // namespace

InitialData two_wave(const EchoConfig& c) {
    InitialData f;
    if (c.eps1 != 0.0) f.modes.push_back({c.k1, c.eta1, c.eps1});
    if (c.eps2 != 0.0) f.modes.push_back({c.k2, c.eta2, c.eps2});
    return f;
}

cplx picard_density(const InitialData& f0, int k, double t, int k_max) {
    if (t <= 0.0) return 0.0;
    cplx total{0.0, 0.0};
    quad::AdaptiveOptions opts;
    opts.abs_tol = 1e-18;
    opts.rel_tol = 1e-12;
    opts.initial_width = 0.25;
    for (int l = -k_max; l <= k_max; ++l) {
        const int m = k - l;
        if (l == 0 || m == 0 || m < -k_max || m > k_max) continue;
        auto f = [&](double s) {
            return (k * (t - s) / l) * f0.f_hat(l, l * s) * f0.f_hat(m, k * t - l * s);
        };
        total -= quad::integrate(f, 0.0, t, opts).value;
    }
    return total;
}

EchoReport echo_experiment(const EchoConfig& c) {
    if (c.eps1 != 0.0 && !(c.eta1 / c.k1 < c.T)) throw DomainError("echo: need eta1/k1 < T");
    EchoReport rep;
    rep.dt = c.dt;
    const InitialData f0 = two_wave(c);

    nonlinear::RunConfig rc;
    rc.eq = c.eq;
    rc.grid = c.grid;
    rc.dt = c.dt;
    rc.T = c.T;
    rc.f0 = f0;
    rc.record_stride = 1;
    const nonlinear::RunResult run = nonlinear::run(rc);

    auto measured = [&](int k) {
        std::vector<double> a;
        for (const cplx& r : run.traces[k - 1].rho) a.push_back(std::abs(r) / k);  // |E_k|
        return a;
    };

    const int K = c.grid.k_max;
    double loudest = 0.0;

    // first-order bursts of the waves themselves
    struct Wave {
        int k;
        double eta;
        double eps;
    };
    for (const Wave& w : {Wave{c.k1, c.eta1, c.eps1}, Wave{c.k2, c.eta2, c.eps2}}) {
        if (w.eps == 0.0 || w.eta == 0.0 || w.k > K) continue;
        EchoPeak p;
        p.k = w.k;
        p.kind = "primary";
        p.predicted_t = w.eta / w.k;
        p.predicted_amp = std::abs(f0.source(w.k, p.predicted_t)) / w.k;
        const std::vector<double> a = measured(w.k);
        const std::vector<Max> mx = maxima(a, c.dt, noise_floor);
        if (const Max* m = nearest(mx, p.predicted_t)) {
            p.found = true;
            p.measured_t = m->t;
            p.measured_amp = m->amp;
            p.rel_error = std::abs(m->t - p.predicted_t) / p.predicted_t;
            loudest = std::max(loudest, m->amp);
        }
        rep.peaks.push_back(p);
    }

    // generated modes from the second-order Picard iterate
    std::vector<int> gen;
    if (c.eps1 != 0.0 && c.eps2 != 0.0) {
        gen.push_back(c.k1 + c.k2);
        if (c.k1 != c.k2) gen.push_back(std::abs(c.k1 - c.k2));
    }
    for (int k : gen) {
        if (k > K) continue;
        const std::size_t n = run.traces[k - 1].size();
        std::vector<double> pred(n);
        for (std::size_t i = 0; i < n; ++i) pred[i] = std::abs(picard_density(f0, k, i * c.dt, K)) / k;
        double pmax = 0.0;
        for (double x : pred) pmax = std::max(pmax, x);
        const std::vector<Max> pm = maxima(pred, c.dt, std::max(noise_floor, 1e-3 * pmax));
        const std::vector<double> a = measured(k);
        const std::vector<Max> mm = maxima(a, c.dt, noise_floor);
        // the echo of wave 1 (carrying eta1) in mode k sits near eta1 / k
        const double echo_guess = c.eta1 / k;
        const Max* echo_peak = nearest(pm, echo_guess);
        for (const Max& q : pm) {
            EchoPeak p;
            p.k = k;
            p.kind = (&q == echo_peak) ? "echo" : "secondary";
            p.predicted_t = q.t;
            p.predicted_amp = q.amp;
            if (const Max* m = nearest(mm, q.t)) {
                p.found = true;
                p.measured_t = m->t;
                p.measured_amp = m->amp;
                p.rel_error = std::abs(m->t - q.t) / q.t;
                loudest = std::max(loudest, m->amp);
            }
            rep.peaks.push_back(p);
        }
    }
    if (rep.peaks.empty() || !(loudest > noise_floor)) {
        rep.inconclusive = true;
        rep.note = "no field burst above the noise floor";
    }
    return rep;
}

}  // namespace landau::echo
