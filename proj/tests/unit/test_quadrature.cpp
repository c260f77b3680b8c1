#include "generators.hpp"
#include "landau/errors.hpp"
#include "landau/quadrature.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace landau;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("adaptive quadrature reproduces closed-form integrals", "[quadrature]") {
    CHECK_THAT(quad::integrate_real([](double x) { return std::exp(-x * x); }, -10.0, 10.0), WithinRel(std::sqrt(pi), 1e-14));
    const cplx r = quad::integrate([](double x) { return std::exp(cplx{0.0, x}); }, 0.0, pi).value;
    CHECK_THAT(r.real(), WithinAbs(0.0, 1e-14));
    CHECK_THAT(r.imag(), WithinRel(2.0, 1e-14));
    // oscillatory with many periods
    CHECK_THAT(quad::integrate_real([](double x) { return std::cos(40.0 * x) * std::exp(-x); }, 0.0, 40.0),
               WithinRel(1.0 / 1601.0, 1e-10));
}

TEST_CASE("adaptive quadrature is deterministic", "[quadrature]") {
    auto f = [](double x) { return cplx{std::sin(3.0 * x), std::cos(x * x)}; };
    const cplx a = quad::integrate(f, 0.0, 7.0).value;
    const cplx b = quad::integrate(f, 0.0, 7.0).value;
    CHECK(a == b);
}

TEST_CASE("non-finite integrands are rejected instead of refined forever", "[quadrature]") {
    auto f = [](double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
    CHECK_THROWS_AS(quad::integrate_real(f, 0.0, 1.0), DomainError);
}

TEST_CASE("Gauss-Legendre rule is exact for polynomials of degree 2n-1", "[quadrature][property]") {
    FOR_ALL(50, 11, [](int, gen::Rng& rng) {
        const int n = rng.integer(2, 20);
        const auto rule = quad::gauss_legendre(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        std::vector<double> c(static_cast<std::size_t>(2 * n));
        for (auto& x : c) x = rng.uniform(-1.0, 1.0);
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
            double p = 0.0;
            for (std::size_t d = c.size(); d-- > 0;) p = p * rule.nodes[i] + c[d];
            q += rule.weights[i] * p;
        }
        double exact = 0.0;  // int_{-1}^{1} x^d dx
        for (std::size_t d = 0; d < c.size(); d += 2) exact += c[d] * 2.0 / static_cast<double>(d + 1);
        CHECK_THAT(q, WithinAbs(exact, 1e-13));
    });
}
