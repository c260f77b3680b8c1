#include "generators.hpp"
#include "landau/errors.hpp"
#include "landau/penrose.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace landau;
using namespace landau::penrose;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Composite Simpson on [0, 16/k] for the Gaussian symbol; independent of the
// library's adaptive Gauss-Kronrod panels.
cplx simpson_symbol(const Equilibrium& eq, int k, cplx lambda, int n = 200000) {
    const double b = 16.0 / std::abs(k);
    const double h = b / n;
    auto f = [&](double t) { return t * eq.mu_hat(k * t) * std::exp(-lambda * t); };
    cplx acc = f(0.0) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("laplace symbol closed forms at lambda = 0", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    // int_0^inf t e^{-k^2 t^2 / 2} dt = 1 / k^2
    CHECK_THAT(laplace_symbol(g, 1, 0.0).real(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(laplace_symbol(g, 2, 0.0).real(), WithinAbs(0.25, 1e-12));
    CHECK_THAT(std::abs(dispersion(g, 1, 0.0) - 2.0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(dispersion(g, 3, 0.0) - (1.0 + 1.0 / 9.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("laplace symbol decays at large |lambda|", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    CHECK(std::abs(laplace_symbol(g, 1, 100.0)) < 1e-3);
    for (const cplx lam : {cplx{0.0, 1e6}, cplx{1e6, 0.0}, cplx{3.0, -1e6}, cplx{7e5, 7e5}})
        CHECK(std::abs(dispersion(g, 1, lam) - 1.0) < 1e-5);
    CHECK(dispersion(Equilibrium::free(), 2, {0.3, 1.0}) == cplx{1.0, 0.0});
}

TEST_CASE("laplace symbol matches an independent Simpson rule in the strip", "[penrose][property]") {
    const Equilibrium g = Equilibrium::gaussian();
    FOR_ALL(12, 3, [&](int, gen::Rng& rng) {
        const int k = rng.integer(1, 4);
        const cplx lam{rng.uniform(-0.9 * k, 3.0), rng.uniform(-6.0, 6.0)};
        const cplx ref = simpson_symbol(g, k, lam);
        CHECK_THAT(std::abs(laplace_symbol(g, k, lam) - ref), WithinAbs(0.0, 1e-10 * std::max(1.0, std::abs(ref))));
    });
}

TEST_CASE("laplace symbol refuses points outside the convergence region", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    CHECK_THROWS_AS(laplace_symbol(g, 1, {-1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(laplace_symbol(g, 2, {-2.5, 1.0}), DomainError);
    CHECK_THROWS_AS(laplace_symbol(g, 0, {1.0, 0.0}), DomainError);
    CHECK_NOTHROW(laplace_symbol(g, 2, {-1.95, 3.3}));
}

TEST_CASE("dispersion symmetries for even equilibria", "[penrose][property]") {
    FOR_ALL(15, 8, [](int, gen::Rng& rng) {
        const Equilibrium eq = Equilibrium::two_stream(rng.uniform(0.0, 3.0));
        const int k = rng.integer(1, 5);
        const cplx lam{rng.uniform(-0.5, 2.0), rng.uniform(-10.0, 10.0)};
        const cplx d = dispersion(eq, k, lam);
        CHECK_THAT(std::abs(dispersion(eq, k, std::conj(lam)) - std::conj(d)), WithinAbs(0.0, 1e-13));
        CHECK(dispersion(eq, -k, lam) == d);
    });
}

TEST_CASE("winding numbers", "[penrose]") {
    const Rect box{0.0, 5.0, -20.0, 20.0};
    const auto w = winding(Equilibrium::gaussian(), 1, box);
    CHECK(w.count == 0);
    CHECK(std::abs(w.raw - w.count) < 0.1);
    CHECK(count_zeros(Equilibrium::free(), 1, box) == 0);
    // unit-width two_stream(3) is Penrose-stable; the narrow-beam variant is not
    CHECK(count_zeros(Equilibrium::two_stream(3.0), 1, box) == 0);
    const auto u = winding(Equilibrium::two_stream(0.8, 0.3), 1, box);
    CHECK(u.count >= 1);
    CHECK(std::abs(u.raw - u.count) < 0.1);
    // a root on the contour is refused
    CHECK_THROWS_AS(winding(Equilibrium::two_stream(0.8, 0.3), 1, Rect{0.237747553131480, 1.0, -1.0, 1.0}), DomainError);
}

TEST_CASE("Newton roots", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    const Root r = find_root(g, 1, coarse_seed(g, 1, Rect{-0.9, 2.0, 0.0, 4.0}));
    // least-damped Landau root of the Maxwellian at k lambda_D = 1
    CHECK_THAT(r.lambda.real(), WithinAbs(-0.851330458692056, 1e-10));
    CHECK_THAT(r.lambda.imag(), WithinAbs(2.045904865690625, 1e-10));
    CHECK(r.residual < 1e-10);
    CHECK(r.lambda.real() > -g.theta0());
    CHECK(r.lambda.real() < 0.0);
    // conjugate pair
    const Root c = find_root(g, 1, std::conj(r.lambda) + cplx{0.01, 0.01});
    CHECK_THAT(std::abs(c.lambda - std::conj(r.lambda)), WithinAbs(0.0, 1e-10));

    // purely growing root of the narrow two-beam plasma (30-digit reference)
    const Equilibrium ts = Equilibrium::two_stream(0.8, 0.3);
    const Root u = find_root(ts, 1, {0.3, 0.0});
    CHECK_THAT(u.lambda.real(), WithinAbs(0.237747553131480, 1e-10));
    CHECK_THAT(u.lambda.imag(), WithinAbs(0.0, 1e-10));

    CHECK_THROWS_AS(find_root(Equilibrium::free(), 1, {0.5, 0.5}), ConvergenceError);
    CHECK_THROWS_AS(find_root(g, 1, {-1.5, 0.0}), DomainError);
    // for k = 2 the least-damped root lies beyond Re lambda = -2; the iteration must stop, not hang
    CHECK_THROWS_AS(find_root(g, 2, {-1.8, 3.3}), ConvergenceError);
}

TEST_CASE("Penrose margin", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    const auto m = margin(g, 8, 50.0, 501);
    CHECK(m.kappa0 > 0.0);
    CHECK(!m.unstable);
    CHECK(m.k_min == 1);
    // brute-force scan oracle: 1e4 points of |D(k, i omega)| on [0, 50] for the three lowest modes
    double brute = 1e300;
    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i <= 10000; ++i) brute = std::min(brute, std::abs(dispersion(g, k, {0.0, 50.0 * i / 10000})));
    CHECK(m.kappa0 <= brute + 1e-12);
    CHECK_THAT(m.kappa0, WithinAbs(brute, 1e-5));
    CHECK_THAT(m.kappa0, WithinAbs(0.7509172785917652, 1e-8));
    CHECK(m.tail_k > 0.0);
    CHECK(m.tail_omega > 0.0);
    for (const auto& w : m.windings) CHECK(w.count == 0);

    CHECK(margin(Equilibrium::free(), 3, 50.0, 101).kappa0 == 1.0);

    const auto u = margin(Equilibrium::two_stream(0.8, 0.3), 4, 50.0, 201);
    CHECK(u.kappa0 == 0.0);
    REQUIRE(u.unstable);
    CHECK(u.unstable->k == 1);
    CHECK(u.unstable->lambda.real() > 0.0);
}

TEST_CASE("margin moves from positive to zero as the beams separate", "[penrose]") {
    // narrow beams (v_t = 0.3): stable when overlapping, unstable once separated
    auto kappa = [](double u) { return margin(Equilibrium::two_stream(u, 0.3), 3, 30.0, 121).kappa0; };
    CHECK(kappa(0.0) > 0.0);
    CHECK(kappa(0.8) == 0.0);
    double lo = 0.0, hi = 0.8;
    for (int i = 0; i < 8; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kappa(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(hi - lo < 0.01);
    CHECK(kappa(lo) > 0.0);
    CHECK(kappa(hi) == 0.0);
}

TEST_CASE("strip width", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    const auto s = strip_width(g, 8);
    CHECK(s.theta1 > 0.0);
    CHECK(s.theta1 <= 0.5 * g.theta0());
    CHECK_THAT(s.theta1, WithinAbs(0.5, 1e-3));
    for (const auto& w : s.windings) CHECK(w.count == 0);
    CHECK(strip_width(Equilibrium::free(), 4).theta1 == 0.5 * Equilibrium::free().theta0());
    CHECK_THROWS_AS(strip_width(Equilibrium::two_stream(0.8, 0.3), 4), StabilityError);
}

TEST_CASE("symbol envelope on the shifted line Re lambda = -theta1 |k|", "[penrose]") {
    const Equilibrium g = Equilibrium::gaussian();
    const double theta1 = strip_width(g, 8).theta1;
    const SymbolBounds b = symbol_bounds(g, theta1);
    double fitted = 0.0;
    for (int k = 1; k <= 4; ++k)
        for (double w = -30.0; w <= 30.0; w += 0.5) {
            const cplx L = laplace_symbol(g, k, {-theta1 * k, w});
            fitted = std::max(fitted, std::abs(L) * (1.0 + k * k + w * w));
            CHECK(std::abs(L) <= b.C1 / (1.0 + k * k + w * w));
        }
    CHECK(fitted <= b.C1);
    CHECK(b.k_tail >= 1);
}
