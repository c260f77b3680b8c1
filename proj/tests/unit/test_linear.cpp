#include "generators.hpp"
#include "landau/errors.hpp"
#include "landau/linear.hpp"
#include "landau/penrose.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace landau;
using namespace landau::linear;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Manufactured solution: rho(t) = e^{-t/2} (cos 2t + i sin t) and
// S = rho + int_0^t (t-s) mu_hat(k(t-s)) rho(s) ds by composite Simpson on a
// fine grid. The solver must recover rho at O(dt^2).
cplx manufactured_rho(double t) { return std::exp(-0.5 * t) * cplx{std::cos(2.0 * t), std::sin(t)}; }

cplx manufactured_source(const Equilibrium& eq, int k, double t) {
    if (t == 0.0) return manufactured_rho(0.0);
    const int n = 2000;
    const double h = t / n;
    auto f = [&](double s) { return (t - s) * eq.mu_hat(k * (t - s)) * manufactured_rho(s); };
    cplx acc = f(0.0) + f(t);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return manufactured_rho(t) + acc * h / 3.0;
}

double max_err_vs_manufactured(const Equilibrium& eq, int k, double dt, double T) {
    const DensityTrace tr = volterra_solve(eq, k, [&](double t) { return manufactured_source(eq, k, t); }, dt, T);
    double e = 0.0;
    for (std::size_t n = 0; n < tr.size(); ++n) e = std::max(e, std::abs(tr.rho[n] - manufactured_rho(tr.t(n))));
    return e;
}

}  // namespace

TEST_CASE("source of a single gaussian mode", "[linear]") {
    const double eps = 1e-3;
    const InitialData f0 = InitialData::single(1, eps);
    for (double t : {0.0, 0.5, 1.0, 3.0})
        CHECK_THAT(std::abs(source_from_initial(f0, 1, t) - 0.5 * eps * std::exp(-0.5 * t * t)), WithinAbs(0.0, 1e-18));

    const Grid g{2, 8.0, 512};
    const SpectralState s = f0.to_state(g);
    for (double t : {0.0, 0.7, 2.0, 4.0})
        CHECK_THAT(std::abs(source_from_initial(s, 1, t) - 0.5 * eps * std::exp(-0.5 * t * t)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("free transport returns the source", "[linear]") {
    const InitialData f0 = InitialData::single(1, 1e-3);
    const DensityTrace tr =
        volterra_solve(Equilibrium::free(), 1, [&](double t) { return f0.source(1, t); }, 0.01, 5.0);
    REQUIRE(tr.size() == 501);
    for (std::size_t n = 0; n < tr.size(); ++n) CHECK(tr.rho[n] == f0.source(1, tr.t(n)));
}

TEST_CASE("zero source gives zero density", "[linear]") {
    const DensityTrace tr = volterra_solve(Equilibrium::gaussian(), 1, [](double) { return cplx{}; }, 0.01, 5.0);
    for (const cplx& r : tr.rho) CHECK(r == cplx{});
}

TEST_CASE("volterra solve matches a manufactured solution at second order", "[linear]") {
    const Equilibrium g = Equilibrium::gaussian();
    const double e1 = max_err_vs_manufactured(g, 1, 0.04, 8.0);
    const double e2 = max_err_vs_manufactured(g, 1, 0.02, 8.0);
    const double e3 = max_err_vs_manufactured(g, 1, 0.01, 8.0);
    CHECK(e3 < 1e-4);
    CHECK_THAT(e1 / e2, WithinAbs(4.0, 0.5));
    CHECK_THAT(e2 / e3, WithinAbs(4.0, 0.5));
}

TEST_CASE("volterra solve is linear in the source", "[linear]") {
    const Equilibrium eq = Equilibrium::two_stream(3.0);
    FOR_ALL(10, 51, [&](int, gen::Rng& rng) {
        const cplx a = rng.complex(2.0), b = rng.complex(2.0);
        const double w = rng.uniform(0.1, 3.0);
        std::vector<cplx> s1(400), s2(400), s(400);
        for (std::size_t n = 0; n < s.size(); ++n) {
            const double t = n * 0.02;
            s1[n] = std::exp(-t * t / 2);
            s2[n] = std::cos(w * t) / (1.0 + t);
            s[n] = a * s1[n] + b * s2[n];
        }
        const DensityTrace r1 = volterra_solve(eq, 2, s1, 0.02);
        const DensityTrace r2 = volterra_solve(eq, 2, s2, 0.02);
        const DensityTrace r = volterra_solve(eq, 2, s, 0.02);
        for (std::size_t n = 0; n < s.size(); ++n)
            CHECK_THAT(std::abs(r.rho[n] - (a * r1.rho[n] + b * r2.rho[n])), WithinAbs(0.0, 1e-12));
        // doubling the source doubles the solution exactly
        std::vector<cplx> twice(s1);
        for (cplx& z : twice) z *= 2.0;
        const DensityTrace rd = volterra_solve(eq, 2, twice, 0.02);
        for (std::size_t n = 0; n < s.size(); ++n) CHECK(rd.rho[n] == 2.0 * r1.rho[n]);
    });
}

TEST_CASE("step count", "[linear]") {
    CHECK(step_count(0.01, 5.0) == 500);
    CHECK(step_count(0.1, 0.3) == 3);
    CHECK(step_count(0.5, 0.0) == 0);
    CHECK_THROWS_AS(step_count(0.3, 1.0), DomainError);
    CHECK_THROWS_AS(step_count(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(step_count(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(step_count(1e-8, 1.0), DomainError);
    CHECK_THROWS_AS(volterra_solve(Equilibrium::gaussian(), 0, std::vector<cplx>(3), 0.1), DomainError);
}

TEST_CASE("resolvent of free transport vanishes", "[linear]") {
    const ResolventKernel K = resolvent_kernel(Equilibrium::free(), 1, 0.5, 0.01, 100);
    for (double x : K.K) CHECK(x == 0.0);
    const std::vector<cplx> S(101, cplx{1.0, -2.0});
    const DensityTrace tr = solve_via_kernel(S, K);
    for (std::size_t n = 0; n < S.size(); ++n) CHECK(tr.rho[n] == S[n]);
}

TEST_CASE("gaussian resolvent satisfies the resolvent identity and decays", "[linear]") {
    const Equilibrium g = Equilibrium::gaussian();
    const double theta1 = penrose::strip_width(g, 4).theta1;
    REQUIRE(theta1 > 0.0);
    for (int k : {1, 2}) {
        INFO("k = " << k);
        const ResolventKernel K = resolvent_kernel(g, k, theta1, 0.01, 2000);
        // the identity is checked with a trapezoid in s, so its residual is O(dt^2)
        const double r1 = resolvent_identity_residual(g, K);
        const double r2 = resolvent_identity_residual(g, resolvent_kernel(g, k, theta1, 0.005, 4000));
        CHECK(r1 < 2e-5);
        CHECK_THAT(r1 / r2, WithinAbs(4.0, 0.5));
        CHECK(K.theta_fit > 0.0);
        for (std::size_t n = 0; n < K.K.size(); ++n)
            CHECK(std::abs(K.K[n]) <= 1.01 * K.C_fit * std::exp(-K.theta_fit * k * K.t(n)) + K.noise_floor);
        // K(0) = 0 and K'(0) = -1 from K + t mu_hat(kt) + ... = 0
        CHECK_THAT(K.K[0], WithinAbs(0.0, 1e-8));
        CHECK_THAT(K.K[1] / K.dt, WithinAbs(-1.0, 1e-3));
    }
}

TEST_CASE("resolvent refuses a contour beyond the certified strip", "[linear]") {
    const Equilibrium g = Equilibrium::gaussian();
    ResolventOptions o;
    o.theta_hat = 0.6;
    CHECK_THROWS_AS(resolvent_kernel(g, 1, 0.5, 0.01, 100, o), DomainError);
    CHECK_THROWS_AS(resolvent_kernel(g, 0, 0.5, 0.01, 100), DomainError);
}

TEST_CASE("kernel route agrees with the direct volterra solve", "[linear]") {
    const Equilibrium g = Equilibrium::gaussian();
    const double theta1 = penrose::strip_width(g, 4).theta1;
    InitialData f0 = InitialData::single(1, 1e-3, 0.5);
    f0.modes.push_back({2, -1.0, 2e-3});
    const double dt = 0.01;
    const std::size_t n = step_count(dt, 15.0);
    for (int k : {1, 2}) {
        INFO("k = " << k);
        const std::vector<cplx> S = sample_source([&](double t) { return f0.source(k, t); }, dt, n);
        const DensityTrace a = volterra_solve(g, k, S, dt);
        const DensityTrace b = solve_via_kernel(S, resolvent_kernel(g, k, theta1, dt, n));
        double peak = 0.0;
        for (const cplx& z : S) peak = std::max(peak, std::abs(z));
        // both are trapezoid discretizations of the same equation: they agree to O(dt^2) of the source scale
        CHECK(max_difference(a, b) < 1e-3 * peak);
    }
    CHECK_THROWS_AS(solve_via_kernel(std::vector<cplx>(5), resolvent_kernel(g, 1, theta1, dt, 10)), DomainError);
}

TEST_CASE("decay fit on synthetic traces", "[linear]") {
    std::vector<double> t, a, c, osc;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(i * 0.01);
        a.push_back(2.0 * std::exp(-0.3 * t.back()));
        c.push_back(1.5);
        osc.push_back(std::abs(std::cos(2.0 * t.back())) * std::exp(-0.3 * t.back()));
    }
    const DecayFit f = fit_decay(t, a, 1.0, 2.0, 18.0);
    CHECK_THAT(f.rate, WithinAbs(0.3, 1e-12));
    CHECK_THAT(f.log_amplitude, WithinAbs(std::log(2.0), 1e-10));
    CHECK_FALSE(f.envelope);
    CHECK_THAT(fit_decay(t, c, 1.0, 2.0, 18.0).rate, WithinAbs(0.0, 1e-14));
    const DecayFit fo = fit_decay(t, osc, 1.0, 2.0, 18.0);
    CHECK(fo.envelope);
    CHECK_THAT(fo.rate, WithinAbs(0.3, 1e-4));
    // stretched exponential recovered with gamma = 1/2
    std::vector<double> s;
    for (double x : t) s.push_back(std::exp(-0.7 * std::sqrt(x)));
    CHECK_THAT(fit_decay(t, s, 0.5, 1.0, 18.0).rate, WithinAbs(0.7, 1e-10));
    CHECK_THROWS_AS(fit_decay(t, a, 1.0, 2.0, 2.05), DomainError);
    CHECK_THROWS_AS(fit_decay(t, std::vector<double>(3), 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("fitted damping rate matches the least damped root", "[linear]") {
    const Equilibrium g = Equilibrium::gaussian();
    const double rate = -penrose::find_root(g, 1, cplx{-0.8, 2.0}).lambda.real();
    const InitialData f0 = InitialData::single(1, 1e-3);
    const DensityTrace tr = volterra_solve(g, 1, [&](double t) { return f0.source(1, t); }, 0.01, 20.0);
    const DecayFit f = fit_decay(tr, 1.0, 3.0, 20.0);
    CHECK(f.envelope);
    CHECK_THAT(f.rate, WithinRel(rate, 0.02));
}
