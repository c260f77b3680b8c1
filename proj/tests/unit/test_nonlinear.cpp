#include "generators.hpp"
#include "landau/errors.hpp"
#include "landau/linear.hpp"
#include "landau/nonlinear.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace landau;
using namespace landau::nonlinear;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// g_k(v) = c_k exp(-(v - a_k)^2 / (2 w_k^2)) for k = 0..K, negative modes by
// conjugation. Density and v-derivative are known in closed form.
struct Bumps {
    std::vector<cplx> c;
    std::vector<double> a, w;

    cplx g(int k, double v) const {
        if (k < 0) return std::conj(g(-k, v));
        const double x = (v - a[k]) / w[k];
        return c[k] * std::exp(-0.5 * x * x);
    }
    cplx dg(int k, double v) const {
        if (k < 0) return std::conj(dg(-k, v));
        return -(v - a[k]) / (w[k] * w[k]) * g(k, v);
    }
    // int g_k e^{-ikvt} dv
    cplx rho(int k, double t) const {
        if (k < 0) return std::conj(rho(-k, t));
        const double s = w[k] * k * t;
        return c[k] * std::sqrt(2.0 * pi) * w[k] * std::exp(cplx{-0.5 * s * s, -k * t * a[k]});
    }
    cplx E(int k, double t) const { return k == 0 ? cplx{} : rho(k, t) / cplx{0.0, double(k)}; }

    SpectralState state(const Grid& grid) const {
        SpectralState s(grid, 0.0);
        for (int k = -grid.k_max; k <= grid.k_max; ++k)
            for (int j = 0; j < grid.n_v; ++j) s.at(k, j) = g(k, grid.v(j));
        return s;
    }

    static Bumps random(int K, gen::Rng& rng, double amp) {
        Bumps b;
        for (int k = 0; k <= K; ++k) {
            b.c.push_back(k == 0 ? cplx{rng.uniform(-amp, amp), 0.0} : rng.complex(amp));
            b.a.push_back(k == 0 ? 0.0 : rng.uniform(-0.5, 0.5));
            b.w.push_back(rng.uniform(0.6, 0.9));
        }
        return b;
    }
};

// -v e^{-v^2/2} / sqrt(2 pi)
double gaussian_dmu(double v) { return -v * std::exp(-0.5 * v * v) / std::sqrt(2.0 * pi); }

// The transported-frame Vlasov right-hand side written out pointwise.
cplx rhs_oracle(const Bumps& b, int K, int k, double v, double t, bool lin, bool quad) {
    cplx out{};
    if (lin && k != 0) out -= b.E(k, t) * std::exp(cplx{0.0, k * v * t}) * gaussian_dmu(v);
    if (quad)
        for (int l = -K; l <= K; ++l) {
            const int m = k - l;
            if (l == 0 || m < -K || m > K) continue;
            out -= b.E(l, t) * std::exp(cplx{0.0, l * v * t}) * (b.dg(m, v) - cplx{0.0, m * t} * b.g(m, v));
        }
    return out;
}

RunConfig small_run(double eps, double T, double dt) {
    RunConfig c;
    c.eq = Equilibrium::gaussian();
    c.grid = Grid{3, 8.0, 256};
    c.dt = dt;
    c.T = T;
    c.f0 = InitialData::single(1, eps);
    c.f0.modes.push_back({2, 0.5, 0.5 * eps});
    return c;
}

}  // namespace

TEST_CASE("field from density", "[nonlinear]") {
    const std::vector<cplx> E = field({cplx{5.0, 1.0}, cplx{0.0, 2.0}, cplx{4.0, 0.0}});
    CHECK(E[0] == cplx{});
    CHECK_THAT(std::abs(E[1] - cplx{2.0, 0.0}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(E[2] - cplx{0.0, -2.0}), WithinAbs(0.0, 1e-15));
}

TEST_CASE("density matches the closed form", "[nonlinear]") {
    const Grid grid{3, 8.0, 512};
    Solver s(Equilibrium::gaussian(), grid);
    FOR_ALL(10, 61, [&](int, gen::Rng& rng) {
        const Bumps b = Bumps::random(3, rng, 1.0);
        const SpectralState st = b.state(grid);
        const double t = rng.uniform(0.0, 5.0);
        const std::vector<cplx> rho = s.density(st, t);
        CHECK(rho[0] == cplx{});
        for (int k = 1; k <= 3; ++k) CHECK_THAT(std::abs(rho[k] - b.rho(k, t)), WithinAbs(0.0, 1e-13));
    });
}

TEST_CASE("right-hand side of the zero state vanishes", "[nonlinear]") {
    const Grid grid{2, 8.0, 128};
    Solver s(Equilibrium::gaussian(), grid);
    SpectralState zero(grid), out(grid);
    s.rhs(zero, 1.5, out);
    for (const cplx& z : out.data()) CHECK(z == cplx{});
}

TEST_CASE("right-hand side matches the pointwise oracle", "[nonlinear]") {
    const int K = 3;
    const Grid grid{K, 8.0, 512};
    for (auto [lin, quad] : {std::pair{true, true}, {true, false}, {false, true}}) {
        INFO("linear " << lin << " quadratic " << quad);
        Solver s(Equilibrium::gaussian(), grid, Couplings{lin, quad, true});
        FOR_ALL(8, 71, [&](int, gen::Rng& rng) {
            const Bumps b = Bumps::random(K, rng, 1.0);
            const SpectralState st = b.state(grid);
            const double t = rng.uniform(0.0, 3.0);
            SpectralState out(grid);
            s.rhs(st, t, out);
            double err = 0.0, scale = 0.0;
            for (int k = -K; k <= K; ++k)
                for (int j = 0; j < grid.n_v; ++j) {
                    const cplx o = rhs_oracle(b, K, k, grid.v(j), t, lin, quad);
                    err = std::max(err, std::abs(out.at(k, j) - o));
                    scale = std::max(scale, std::abs(o));
                }
            CHECK(err <= 1e-10 * std::max(scale, 1.0));
        });
    }
}

TEST_CASE("frozen field leaves the state unchanged", "[nonlinear]") {
    RunConfig c = small_run(1e-2, 1.0, 0.01);
    c.couplings.feedback = false;
    const RunResult r = run(c);
    const SpectralState s0 = c.f0.to_state(c.grid);
    REQUIRE(r.final_state.data().size() == s0.data().size());
    for (std::size_t i = 0; i < s0.data().size(); ++i) CHECK(r.final_state.data()[i] == s0.data()[i]);
}

TEST_CASE("zero amplitude stays zero", "[nonlinear]") {
    const RunResult r = run(small_run(0.0, 2.0, 0.01));
    for (const auto& tr : r.traces)
        for (const cplx& z : tr.rho) CHECK(z == cplx{});
    CHECK(r.log.mass_drift() == 0.0);
}

TEST_CASE("linear couplings reproduce the volterra solution", "[nonlinear]") {
    const double eps = 1e-3;
    RunConfig c = small_run(eps, 10.0, 0.01);
    c.couplings.quadratic = false;
    const RunResult r = run(c);
    // Richardson-extrapolated trapezoid Volterra solve as the reference
    for (int k : {1, 2}) {
        INFO("k = " << k);
        auto S = [&](double t) { return c.f0.source(k, t); };
        const auto a = linear::volterra_solve(c.eq, k, S, 0.005, 10.0);
        const auto b = linear::volterra_solve(c.eq, k, S, 0.0025, 10.0);
        const auto& tr = r.traces[k - 1];
        double err = 0.0;
        for (std::size_t n = 0; n < tr.size(); ++n) {
            const cplx ref = (4.0 * b.rho[4 * n] - a.rho[2 * n]) / 3.0;
            err = std::max(err, std::abs(tr.rho[n] - ref));
        }
        CHECK(err < 1e-8 * eps);
    }
}

TEST_CASE("rk4 converges at fourth order", "[nonlinear]") {
    auto final_rho = [](double dt) {
        RunConfig c = small_run(0.2, 2.0, dt);
        return run(c).traces[0].rho.back();
    };
    const cplx a = final_rho(0.02), b = final_rho(0.01), c = final_rho(0.005), d = final_rho(0.0025);
    const double r1 = std::abs(a - b) / std::abs(b - c);
    const double r2 = std::abs(b - c) / std::abs(c - d);
    CHECK_THAT(r1, WithinAbs(16.0, 2.0));
    CHECK_THAT(r2, WithinAbs(16.0, 2.0));
}

TEST_CASE("oversized steps are refused with a usable suggestion", "[nonlinear]") {
    RunConfig c = small_run(2.0, 1.0, 0.5);
    try {
        run(c);
        FAIL("expected StabilityError");
    } catch (const StabilityError& e) {
        CHECK(e.suggested_dt() > 0.0);
        CHECK(e.suggested_dt() < 0.5);
    }
    c.check_stability = false;
    CHECK_NOTHROW(run(c));
}

TEST_CASE("unresolved phases are refused", "[nonlinear]") {
    RunConfig c = small_run(1e-3, 30.0, 0.01);
    c.grid.n_v = 128;
    try {
        run(c);
        FAIL("expected ResolutionError");
    } catch (const ResolutionError& e) {
        CHECK(e.required_nv() >= required_nv(8.0, 3 * 30.0 + 0.5));
    }
}

TEST_CASE("conservation along a nonlinear run", "[nonlinear]") {
    RunConfig c = small_run(0.05, 5.0, 0.01);
    const RunResult r = run(c);
    CHECK(r.log.mass_drift() < 1e-12);
    CHECK(r.log.max_reality_drift() < 1e-12);
    for (double d : r.log.dropped) CHECK(d >= 0.0);

    // without the equilibrium drive the quadratic flow transports g, so the L2
    // norm is only changed by the mode truncation
    c.couplings.linear = false;
    const RunResult q = run(c);
    CHECK(q.log.l2_relative_drift() < 1e-6);
}

TEST_CASE("closure identity", "[nonlinear]") {
    // the s-integrals use the trapezoid rule, so the residual is O(dt^2)
    auto residual = [](double eps, bool quadratic, double dt) {
        RunConfig c = small_run(eps, 5.0, dt);
        c.dense = true;
        c.couplings.quadratic = quadratic;
        const RunResult r = run(c);
        return r.closure_residual / r.closure_scale;
    };
    for (bool quad : {false, true}) {
        INFO("quadratic " << quad);
        const double r1 = residual(0.05, quad, 0.01), r2 = residual(0.05, quad, 0.005);
        CHECK(r1 < 1e-5);
        CHECK_THAT(r1 / r2, WithinAbs(4.0, 0.5));
    }
    RunConfig z = small_run(0.0, 2.0, 0.01);
    z.dense = true;
    CHECK(run(z).closure_residual == 0.0);
}

TEST_CASE("nonlinear correction is quadratic in the amplitude", "[nonlinear]") {
    auto deviation = [](double eps) {
        RunConfig c = small_run(eps, 5.0, 0.01);
        const RunResult full = run(c);
        c.couplings.quadratic = false;
        const RunResult lin = run(c);
        double d = 0.0;
        for (std::size_t k = 0; k < full.traces.size(); ++k)
            for (std::size_t n = 0; n < full.traces[k].size(); ++n)
                d = std::max(d, std::abs(full.traces[k].rho[n] - lin.traces[k].rho[n]));
        return d;
    };
    const double d1 = deviation(1e-2), d2 = deviation(5e-3);
    CHECK(d1 > 0.0);
    CHECK_THAT(d1 / d2, WithinAbs(4.0, 0.2));
}
