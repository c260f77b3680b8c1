#pragma once

#include "landau/equilibria.hpp"
#include "landau/errors.hpp"
#include "landau/initial_data.hpp"
#include "landau/norms.hpp"
#include "landau/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace landau::cli {

struct EquilibriumSpec {
    std::string name = "gaussian";
    double u = 3.0;
    double v_t = 1.0;

    Equilibrium make() const;
    bool operator==(const EquilibriumSpec&) const = default;
};

struct TimeSpec {
    double dt = 5e-3;
    double T = 30.0;
    int stride = 1;           // trace samples every `stride` steps
    int snapshot_stride = 0;  // 0: no snapshot files
    bool operator==(const TimeSpec&) const = default;
};

struct InitialSpec {
    std::vector<ModeSpec> modes{{1, 0.0, 1e-3}};
    std::string profile = "gaussian";
    double gevrey_lambda = 1.0;
    double gevrey_gamma = 0.6;
    int random_modes = 0;  // extra modes drawn from --seed
    double random_amplitude = 1e-4;

    InitialData make(std::uint64_t seed, int k_max) const;
    bool operator==(const InitialSpec& o) const;
};

struct PenroseSpec {
    int k_scan = 8;
    double omega_max = 50.0;
    int n_omega = 501;
    int roots = 3;  // modes for which the least-damped root is reported
    bool operator==(const PenroseSpec&) const = default;
};

struct LinearSpec {
    std::vector<int> k_list{1, 2, 3, 4};
    std::string route = "both";  // volterra | kernel | both
    double fit_start = 3.0;
    double fit_end = -1.0;  // < 0: end of run
    double fit_gamma = 1.0;
    bool operator==(const LinearSpec&) const = default;
};

struct NonlinearSpec {
    bool linear = true;
    bool quadratic = true;
    bool feedback = true;
    bool dense = false;
    bool check_stability = true;
    bool operator==(const NonlinearSpec&) const = default;
};

struct EchoSpec {
    int k1 = 1;
    double eta1 = 10.0;
    double eps1 = 1e-3;
    int k2 = 1;
    double eta2 = 0.0;
    double eps2 = 1e-3;
    bool mean_field = false;  // true: use [equilibrium] instead of free transport
    bool operator==(const EchoSpec&) const = default;
};

struct NormsSpec {
    std::string input;  // directory holding snap_*.bin
    double eps = 1e-3;  // amplitude in the decay bound sqrt(eps) <t>^{1-sigma}
    bool operator==(const NormsSpec&) const = default;
};

struct OutputSpec {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool has(const std::string& f) const;
    bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
    EquilibriumSpec equilibrium;
    Grid grid{8, 8.0, 2048};
    TimeSpec time;
    norms::WeightParams weights;
    int z_points = 33;
    InitialSpec initial;
    PenroseSpec penrose;
    LinearSpec linear;
    NonlinearSpec nonlinear;
    EchoSpec echo;
    NormsSpec norms;
    OutputSpec output;

    bool operator==(const ExperimentConfig& o) const;
};

// All problems found while parsing, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// INI text with flat sections; unknown sections or keys are errors. Values
// may be overridden by LANDAU_<SECTION>_<KEY> environment variables
// (upper case) when `use_env` is set.
ExperimentConfig parse(const std::string& text, bool use_env = true);
ExperimentConfig parse_file(const std::string& path, bool use_env = true);

// Fully resolved config in the same format; parse(echo(c), false) == c.
std::string echo(const ExperimentConfig& c);
// FNV-1a of echo(c), 16 hex digits
std::string config_hash(const ExperimentConfig& c);

std::vector<std::string> validate(const ExperimentConfig& c);

}  // namespace landau::cli
