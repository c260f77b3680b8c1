#include "generators.hpp"
#include "landau/cli/config.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>

using namespace landau;
using namespace landau::cli;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<std::string> problems_of(const std::string& text) {
    try {
        parse(text, false);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& s) {
    for (const auto& x : v)
        if (x.find(s) != std::string::npos) return true;
    return false;
}

// Valid configs with values drawn across their admissible ranges.
ExperimentConfig random_config(gen::Rng& rng) {
    ExperimentConfig c;
    const char* eqs[] = {"gaussian", "two_stream", "free"};
    c.equilibrium.name = eqs[rng.integer(0, 2)];
    c.equilibrium.u = rng.uniform(0.0, 5.0);
    c.equilibrium.v_t = rng.uniform(0.1, 2.0);
    c.grid.k_max = rng.integer(1, 8);
    c.grid.V = rng.uniform(6.0, 12.0);
    c.time.dt = 1.0 / rng.integer(10, 400);
    c.time.T = c.time.dt * rng.integer(10, 2000);
    c.time.stride = rng.integer(1, 5);
    c.time.snapshot_stride = c.time.stride * rng.integer(0, 4);
    c.weights.gamma = rng.uniform(0.6, 1.0);
    c.weights.sigma = rng.uniform(3.2, 6.0);
    c.weights.lambda1 = rng.uniform(0.1, 1.0);
    c.weights.lambda0 = rng.uniform(0.01, 0.25) * c.weights.lambda1;
    c.initial.modes.clear();
    for (int i = rng.integer(1, 3); i > 0; --i)
        c.initial.modes.push_back({rng.integer(1, c.grid.k_max), rng.uniform(-3.0, 3.0), rng.uniform(0.0, 1e-2)});
    c.initial.profile = rng.integer(0, 1) ? "gaussian" : "gevrey";
    c.initial.gevrey_gamma = rng.uniform(0.3, 1.0);
    c.initial.random_modes = rng.integer(0, 3);
    c.linear.k_list = {rng.integer(1, 4), rng.integer(1, 4)};
    c.linear.route = rng.integer(0, 1) ? "both" : "volterra";
    c.linear.fit_start = rng.uniform(0.0, 5.0);
    c.nonlinear.dense = rng.integer(0, 1);
    c.echo.k1 = rng.integer(1, c.grid.k_max);
    c.echo.eta1 = rng.uniform(-20.0, 20.0);
    c.norms.input = rng.integer(0, 1) ? "" : "some/dir";
    c.output.formats = rng.integer(0, 1) ? std::vector<std::string>{"csv"} : std::vector<std::string>{"json", "snapshots"};
    double eta = 0.0;
    for (const auto& m : c.initial.modes) eta = std::max(eta, std::abs(m.eta_offset));
    if (c.initial.random_modes > 0) eta = std::max(eta, 2.0);
    c.grid.n_v = required_nv(c.grid.V, c.grid.k_max * c.time.T + eta) + 2 * rng.integer(0, 8);
    return c;
}

}  // namespace

TEST_CASE("defaults are valid", "[config]") {
    const ExperimentConfig c = parse("", false);
    CHECK(c == ExperimentConfig{});
    CHECK(validate(c).empty());
    CHECK(c.grid.k_max == 8);
    CHECK(c.grid.n_v == 2048);
    CHECK(c.time.dt == 5e-3);
    CHECK(c.equilibrium.name == "gaussian");
}

TEST_CASE("weight constraints are reported as inequalities", "[config]") {
    CHECK(any_contains(problems_of("[weights]\ngamma = 0.3\n"), "gamma in (1/3, 1]"));
    CHECK(any_contains(problems_of("[weights]\nsigma = 2\n"), "σ > 3 + δ"));
    const auto p = problems_of("[weights]\ngamma = 0.3\nsigma = 2\n[equilibrium]\nname = maxwell\n[linear]\nroute = x\n");
    CHECK(p.size() >= 4);
    CHECK(any_contains(p, "equilibrium.name"));
    CHECK(any_contains(p, "linear.route"));
}

TEST_CASE("unknown sections and keys are rejected", "[config]") {
    CHECK(any_contains(problems_of("[grid]\nkmax = 4\n"), "unknown key 'kmax' in [grid]"));
    CHECK(any_contains(problems_of("[solver]\nx = 1\n"), "unknown section [solver]"));
    CHECK(any_contains(problems_of("x = 1\n"), "unknown top-level key 'x'"));
}

TEST_CASE("malformed values are reported with their key", "[config]") {
    const auto p = problems_of("[time]\ndt = fast\n[grid]\nk_max = 2.5\n[nonlinear]\ndense = maybe\n");
    CHECK(any_contains(p, "time.dt: cannot parse 'fast'"));
    CHECK(any_contains(p, "grid.k_max: cannot parse '2.5'"));
    CHECK(any_contains(p, "nonlinear.dense: cannot parse 'maybe'"));
    CHECK(any_contains(problems_of("[initial]\nmodes = 1:2\n"), "k:eta_offset:amplitude"));
    CHECK(any_contains(problems_of("[grid\n"), "malformed config"));
}

TEST_CASE("resolution rule", "[config]") {
    // k_max T = 240 on V = 8 needs N_v >= 16 * 240 / (2 pi) rounded up to even
    const auto p = problems_of("[grid]\nN_v = 1024\n");
    REQUIRE(any_contains(p, "resolution rule"));
    CHECK(any_contains(p, "N_v >= 1224"));
    CHECK(problems_of("[grid]\nN_v = 1224\n").empty());
    CHECK(any_contains(problems_of("[time]\nT = 1\ndt = 0.3\n"), "T/dt must be an integer"));
    CHECK(any_contains(problems_of("[time]\nstride = 3\nsnapshot_stride = 4\n"), "multiple of stride"));
}

TEST_CASE("echo round-trips", "[config]") {
    FOR_ALL(200, 111, [&](int, gen::Rng& rng) {
        const ExperimentConfig c = random_config(rng);
        REQUIRE(validate(c).empty());
        const std::string text = echo(c);
        const ExperimentConfig back = parse(text, false);
        CHECK(back == c);
        CHECK(echo(back) == text);
        CHECK(config_hash(back) == config_hash(c));
    });
}

TEST_CASE("hash tracks every field", "[config]") {
    const ExperimentConfig a;
    ExperimentConfig b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.time.dt = std::nextafter(b.time.dt, 1.0);
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.output.formats.push_back("snapshots");
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("environment overrides", "[config]") {
    ::setenv("LANDAU_GRID_K_MAX", "4", 1);
    ::setenv("LANDAU_EQUILIBRIUM_NAME", "free", 1);
    const ExperimentConfig c = parse("[grid]\nk_max = 2\n", true);
    CHECK(c.grid.k_max == 4);
    CHECK(c.equilibrium.name == "free");
    CHECK(parse("[grid]\nk_max = 2\n", false).grid.k_max == 2);
    ::setenv("LANDAU_TIME_DT", "nope", 1);
    try {
        parse("", true);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(any_contains(e.problems(), "LANDAU_TIME_DT: cannot parse 'nope'"));
    }
    ::unsetenv("LANDAU_GRID_K_MAX");
    ::unsetenv("LANDAU_EQUILIBRIUM_NAME");
    ::unsetenv("LANDAU_TIME_DT");
}

TEST_CASE("missing file", "[config]") {
    CHECK_THROWS_AS(parse_file("/nonexistent/landau.ini"), ConfigError);
}
