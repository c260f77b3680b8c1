#include "landau/quadrature.hpp"

#include "landau/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace landau::quad {
namespace {

// Kronrod 15-point extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    cplx kronrod;
    cplx gauss;
    double abs_sum;  // Kronrod rule applied to |f|, sets the rounding floor
};

Panel kronrod15(const ComplexIntegrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx rk = fc * wgk[7];
    cplx rg = fc * wg[3];
    double ra = std::abs(fc) * wgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const cplx f1 = f(c - dx);
        const cplx f2 = f(c + dx);
        const cplx s = f1 + f2;
        rk += wgk[j] * s;
        ra += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    return {rk * h, rg * h, ra * std::abs(h)};
}

struct Accumulator {
    cplx value{0.0, 0.0};
    double error = 0.0;
    int evaluations = 0;
};

void refine(const ComplexIntegrand& f, double a, double b, const Panel& p, double tol_density,
            const AdaptiveOptions& opts, int depth, Accumulator& acc) {
    const double err = std::abs(p.kronrod - p.gauss);
    if (!std::isfinite(err)) throw DomainError("quadrature: integrand is not finite on the interval");
    const double rounding = 50.0 * std::numeric_limits<double>::epsilon() * p.abs_sum;
    const double allowed = std::max({tol_density * (b - a), opts.rel_tol * std::abs(p.kronrod), rounding});
    if (err <= allowed || depth >= opts.max_depth) {
        acc.value += p.kronrod;
        acc.error += err;
        return;
    }
    const double m = 0.5 * (a + b);
    const Panel left = kronrod15(f, a, m);
    const Panel right = kronrod15(f, m, b);
    acc.evaluations += 30;
    refine(f, a, m, left, tol_density, opts, depth + 1, acc);
    refine(f, m, b, right, tol_density, opts, depth + 1, acc);
}

}  // namespace

Result integrate(const ComplexIntegrand& f, double a, double b, const AdaptiveOptions& opts) {
    if (!(b > a)) return {cplx{0.0, 0.0}, 0.0, 0};
    const double width = opts.initial_width > 0.0 ? opts.initial_width : (b - a);
    const auto panels = static_cast<long>(std::max(1.0, std::ceil((b - a) / width)));
    const double h = (b - a) / static_cast<double>(panels);
    const double tol_density = opts.abs_tol / (b - a);
    Accumulator acc;
    for (long i = 0; i < panels; ++i) {
        const double lo = a + static_cast<double>(i) * h;
        const double hi = (i + 1 == panels) ? b : lo + h;
        const Panel p = kronrod15(f, lo, hi);
        acc.evaluations += 15;
        refine(f, lo, hi, p, tol_density, opts, 0, acc);
    }
    return {acc.value, acc.error, acc.evaluations};
}

double integrate_real(const RealIntegrand& f, double a, double b, const AdaptiveOptions& opts) {
    return integrate([&f](double x) { return cplx{f(x), 0.0}; }, a, b, opts).value.real();
}

Rule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace landau::quad
