#include "landau/cli/config.hpp"

#include "landau/linear.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace landau::cli {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (trim(s.substr(pos)).size() != 0 || !std::isfinite(x)) throw std::invalid_argument("not a finite number");
    return x;
}

int to_int(const std::string& s) {
    std::size_t pos = 0;
    const long x = std::stol(s, &pos);
    if (trim(s.substr(pos)).size() != 0) throw std::invalid_argument("not an integer");
    if (x < INT32_MIN || x > INT32_MAX) throw std::out_of_range("integer out of range");
    return static_cast<int>(x);
}

bool to_bool(const std::string& s) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    throw std::invalid_argument("not a boolean");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field num(const char* sec, const char* key, T ExperimentConfig::*part, double T::*member) {
    return {sec, key, [=](ExperimentConfig& c, const std::string& s) { (c.*part).*member = to_double(s); },
            [=](const ExperimentConfig& c) { return fmt((c.*part).*member); }};
}
template <class T>
Field integer(const char* sec, const char* key, T ExperimentConfig::*part, int T::*member) {
    return {sec, key, [=](ExperimentConfig& c, const std::string& s) { (c.*part).*member = to_int(s); },
            [=](const ExperimentConfig& c) { return std::to_string((c.*part).*member); }};
}
template <class T>
Field boolean(const char* sec, const char* key, T ExperimentConfig::*part, bool T::*member) {
    return {sec, key, [=](ExperimentConfig& c, const std::string& s) { (c.*part).*member = to_bool(s); },
            [=](const ExperimentConfig& c) { return from_bool((c.*part).*member); }};
}
template <class T>
Field text(const char* sec, const char* key, T ExperimentConfig::*part, std::string T::*member) {
    return {sec, key, [=](ExperimentConfig& c, const std::string& s) { (c.*part).*member = trim(s); },
            [=](const ExperimentConfig& c) { return (c.*part).*member; }};
}

std::string modes_to_string(const std::vector<ModeSpec>& m) {
    std::vector<std::string> parts;
    for (const auto& x : m) parts.push_back(std::to_string(x.k) + ":" + fmt(x.eta_offset) + ":" + fmt(x.amplitude));
    return join(parts);
}

std::vector<ModeSpec> modes_from_string(const std::string& s) {
    std::vector<ModeSpec> out;
    for (const auto& item : split(s, ',')) {
        const auto f = split(item, ':');
        if (f.size() != 3) throw std::invalid_argument("mode '" + item + "' is not k:eta_offset:amplitude");
        out.push_back({to_int(f[0]), to_double(f[1]), to_double(f[2])});
    }
    return out;
}

const std::vector<Field>& schema() {
    using C = ExperimentConfig;
    static const std::vector<Field> fields = {
        text("equilibrium", "name", &C::equilibrium, &EquilibriumSpec::name),
        num("equilibrium", "u", &C::equilibrium, &EquilibriumSpec::u),
        num("equilibrium", "v_t", &C::equilibrium, &EquilibriumSpec::v_t),

        integer("grid", "k_max", &C::grid, &Grid::k_max),
        num("grid", "V", &C::grid, &Grid::V),
        integer("grid", "N_v", &C::grid, &Grid::n_v),

        num("time", "dt", &C::time, &TimeSpec::dt),
        num("time", "T", &C::time, &TimeSpec::T),
        integer("time", "stride", &C::time, &TimeSpec::stride),
        integer("time", "snapshot_stride", &C::time, &TimeSpec::snapshot_stride),

        num("weights", "gamma", &C::weights, &norms::WeightParams::gamma),
        num("weights", "sigma", &C::weights, &norms::WeightParams::sigma),
        num("weights", "delta", &C::weights, &norms::WeightParams::delta),
        num("weights", "lambda0", &C::weights, &norms::WeightParams::lambda0),
        num("weights", "lambda1", &C::weights, &norms::WeightParams::lambda1),
        {"weights", "z_points", [](C& c, const std::string& s) { c.z_points = to_int(s); },
         [](const C& c) { return std::to_string(c.z_points); }},

        {"initial", "modes", [](C& c, const std::string& s) { c.initial.modes = modes_from_string(s); },
         [](const C& c) { return modes_to_string(c.initial.modes); }},
        text("initial", "profile", &C::initial, &InitialSpec::profile),
        num("initial", "gevrey_lambda", &C::initial, &InitialSpec::gevrey_lambda),
        num("initial", "gevrey_gamma", &C::initial, &InitialSpec::gevrey_gamma),
        integer("initial", "random_modes", &C::initial, &InitialSpec::random_modes),
        num("initial", "random_amplitude", &C::initial, &InitialSpec::random_amplitude),

        integer("penrose", "k_scan", &C::penrose, &PenroseSpec::k_scan),
        num("penrose", "omega_max", &C::penrose, &PenroseSpec::omega_max),
        integer("penrose", "n_omega", &C::penrose, &PenroseSpec::n_omega),
        integer("penrose", "roots", &C::penrose, &PenroseSpec::roots),

        {"linear", "k_list",
         [](C& c, const std::string& s) {
             c.linear.k_list.clear();
             for (const auto& x : split(s, ',')) c.linear.k_list.push_back(to_int(x));
         },
         [](const C& c) {
             std::vector<std::string> p;
             for (int k : c.linear.k_list) p.push_back(std::to_string(k));
             return join(p);
         }},
        text("linear", "route", &C::linear, &LinearSpec::route),
        num("linear", "fit_start", &C::linear, &LinearSpec::fit_start),
        num("linear", "fit_end", &C::linear, &LinearSpec::fit_end),
        num("linear", "fit_gamma", &C::linear, &LinearSpec::fit_gamma),

        boolean("nonlinear", "linear", &C::nonlinear, &NonlinearSpec::linear),
        boolean("nonlinear", "quadratic", &C::nonlinear, &NonlinearSpec::quadratic),
        boolean("nonlinear", "feedback", &C::nonlinear, &NonlinearSpec::feedback),
        boolean("nonlinear", "dense", &C::nonlinear, &NonlinearSpec::dense),
        boolean("nonlinear", "check_stability", &C::nonlinear, &NonlinearSpec::check_stability),

        integer("echo", "k1", &C::echo, &EchoSpec::k1),
        num("echo", "eta1", &C::echo, &EchoSpec::eta1),
        num("echo", "eps1", &C::echo, &EchoSpec::eps1),
        integer("echo", "k2", &C::echo, &EchoSpec::k2),
        num("echo", "eta2", &C::echo, &EchoSpec::eta2),
        num("echo", "eps2", &C::echo, &EchoSpec::eps2),
        boolean("echo", "mean_field", &C::echo, &EchoSpec::mean_field),

        text("norms", "input", &C::norms, &NormsSpec::input),
        num("norms", "eps", &C::norms, &NormsSpec::eps),

        text("output", "directory", &C::output, &OutputSpec::directory),
        {"output", "formats", [](C& c, const std::string& s) { c.output.formats = split(s, ','); },
         [](const C& c) { return join(c.output.formats); }},
    };
    return fields;
}

std::string env_name(const std::string& sec, const std::string& key) {
    std::string n = "LANDAU_" + sec + "_" + key;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::toupper(c); });
    return n;
}

}  // namespace

Equilibrium EquilibriumSpec::make() const {
    if (name == "gaussian") return Equilibrium::gaussian();
    if (name == "two_stream") return Equilibrium::two_stream(u, v_t);
    if (name == "free") return Equilibrium::free();
    throw DomainError("unknown equilibrium '" + name + "'");
}

InitialData InitialSpec::make(std::uint64_t seed, int k_max) const {
    InitialData d;
    d.modes = modes;
    d.profile = InitialData::parse_profile(profile);
    d.gevrey_lambda = gevrey_lambda;
    d.gevrey_gamma = gevrey_gamma;
    if (random_modes > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> kd(1, k_max);
        std::uniform_real_distribution<double> ed(-2.0, 2.0), ad(0.0, random_amplitude);
        for (int i = 0; i < random_modes; ++i) {
            const int k = kd(rng);
            const double eta = ed(rng);
            d.modes.push_back({k, eta, ad(rng)});
        }
    }
    return d;
}

bool InitialSpec::operator==(const InitialSpec& o) const {
    if (modes.size() != o.modes.size()) return false;
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].k != o.modes[i].k || modes[i].eta_offset != o.modes[i].eta_offset ||
            modes[i].amplitude != o.modes[i].amplitude)
            return false;
    return profile == o.profile && gevrey_lambda == o.gevrey_lambda && gevrey_gamma == o.gevrey_gamma &&
           random_modes == o.random_modes && random_amplitude == o.random_amplitude;
}

bool OutputSpec::has(const std::string& f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    const auto& w = weights;
    const auto& v = o.weights;
    return equilibrium == o.equilibrium && grid == o.grid && time == o.time && w.gamma == v.gamma &&
           w.sigma == v.sigma && w.delta == v.delta && w.lambda0 == v.lambda0 && w.lambda1 == v.lambda1 &&
           z_points == o.z_points && initial == o.initial && penrose == o.penrose && linear == o.linear &&
           nonlinear == o.nonlinear && echo == o.echo && norms == o.norms && output == o.output;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
          std::string m = "invalid configuration:";
          for (const auto& p : problems) m += "\n  " + p;
          return m;
      }()),
      problems_(std::move(problems)) {}

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> out;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    const auto& e = c.equilibrium;
    check(e.name == "gaussian" || e.name == "two_stream" || e.name == "free",
          "equilibrium.name: expected gaussian, two_stream or free, got '" + e.name + "'");
    check(e.u >= 0.0, "equilibrium.u: u >= 0");
    check(e.v_t > 0.0, "equilibrium.v_t: v_t > 0");

    bool grid_ok = true;
    try {
        c.grid.validate();
    } catch (const Error& ex) {
        grid_ok = false;
        out.push_back(std::string("grid: ") + ex.what());
    }
    bool time_ok = c.time.dt > 0.0 && c.time.T > 0.0;
    check(time_ok, "time: dt > 0 and T > 0");
    if (time_ok) {
        try {
            linear::step_count(c.time.dt, c.time.T);
        } catch (const Error& ex) {
            time_ok = false;
            out.push_back(std::string("time: ") + ex.what());
        }
    }
    check(c.time.stride >= 1, "time.stride: stride >= 1");
    check(c.time.snapshot_stride >= 0, "time.snapshot_stride: snapshot_stride >= 0");
    check(c.time.stride < 1 || c.time.snapshot_stride % c.time.stride == 0,
          "time.snapshot_stride: must be a multiple of stride");

    for (const auto& v : c.weights.violations()) out.push_back("weights: " + v);
    check(c.z_points >= 3, "weights.z_points: z_points >= 3");

    const auto& in = c.initial;
    check(in.profile == "gaussian" || in.profile == "gevrey",
          "initial.profile: expected gaussian or gevrey, got '" + in.profile + "'");
    double eta_off = 0.0;
    for (const auto& m : in.modes) {
        check(m.k >= 1 && m.k <= c.grid.k_max, "initial.modes: mode k = " + std::to_string(m.k) + " outside 1..k_max");
        eta_off = std::max(eta_off, std::abs(m.eta_offset));
    }
    check(in.gevrey_lambda > 0.0, "initial.gevrey_lambda: gevrey_lambda > 0");
    check(in.gevrey_gamma > 0.0 && in.gevrey_gamma <= 1.0, "initial.gevrey_gamma: gevrey_gamma in (0, 1]");
    check(in.random_modes >= 0, "initial.random_modes: random_modes >= 0");
    if (in.random_modes > 0) eta_off = std::max(eta_off, 2.0);
    if (grid_ok && time_ok) {
        const double a = c.grid.k_max * c.time.T + eta_off;
        const int need = required_nv(c.grid.V, a);
        check(c.grid.n_v >= need, "grid.N_v: resolution rule N_v >= " + std::to_string(need) + " for k_max T + eta_max = " +
                                      fmt(a) + " (got " + std::to_string(c.grid.n_v) + ")");
    }

    check(c.penrose.k_scan >= 1, "penrose.k_scan: k_scan >= 1");
    check(c.penrose.omega_max > 0.0, "penrose.omega_max: omega_max > 0");
    check(c.penrose.n_omega >= 3, "penrose.n_omega: n_omega >= 3");
    check(c.penrose.roots >= 0, "penrose.roots: roots >= 0");

    check(!c.linear.k_list.empty(), "linear.k_list: at least one mode");
    for (int k : c.linear.k_list) check(k >= 1, "linear.k_list: k >= 1");
    check(c.linear.route == "volterra" || c.linear.route == "kernel" || c.linear.route == "both",
          "linear.route: expected volterra, kernel or both, got '" + c.linear.route + "'");
    check(c.linear.fit_start >= 0.0, "linear.fit_start: fit_start >= 0");
    check(c.linear.fit_gamma > 0.0 && c.linear.fit_gamma <= 1.0, "linear.fit_gamma: fit_gamma in (0, 1]");

    check(c.echo.k1 >= 1 && c.echo.k1 <= c.grid.k_max, "echo.k1: 1 <= k1 <= k_max");
    check(c.echo.k2 >= 1 && c.echo.k2 <= c.grid.k_max, "echo.k2: 1 <= k2 <= k_max");
    check(c.norms.eps > 0.0, "norms.eps: eps > 0");

    for (const auto& f : c.output.formats)
        check(f == "csv" || f == "json" || f == "snapshots", "output.formats: unknown format '" + f + "'");
    check(!c.output.directory.empty(), "output.directory: must not be empty");
    return out;
}

ExperimentConfig parse(const std::string& text, bool use_env) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }

    std::map<std::string, std::map<std::string, const Field*>> index;
    for (const auto& f : schema()) index[f.section][f.key] = &f;

    ExperimentConfig c;
    std::vector<std::string> problems;
    auto apply = [&](const Field& f, const std::string& value, const std::string& origin) {
        try {
            f.set(c, value);
        } catch (const std::exception& e) {
            problems.push_back(origin + ": cannot parse '" + value + "' (" + e.what() + ")");
        }
    };
    for (const auto& [sec, body] : tree) {
        auto s = index.find(sec);
        if (s == index.end()) {
            problems.push_back(body.empty() ? "unknown top-level key '" + sec + "'" : "unknown section [" + sec + "]");
            continue;
        }
        for (const auto& [key, node] : body) {
            auto k = s->second.find(key);
            if (k == s->second.end()) {
                problems.push_back("unknown key '" + key + "' in [" + sec + "]");
                continue;
            }
            apply(*k->second, node.get_value<std::string>(), sec + "." + key);
        }
    }
    if (use_env) {
        for (const auto& f : schema()) {
            const std::string name = env_name(f.section, f.key);
            if (const char* v = std::getenv(name.c_str())) apply(f, v, name);
        }
    }
    for (auto& p : validate(c)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

ExperimentConfig parse_file(const std::string& path, bool use_env) {
    std::ifstream f(path);
    if (!f) throw ConfigError({"cannot read config file '" + path + "'"});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), use_env);
}

std::string echo(const ExperimentConfig& c) {
    std::string out;
    std::string sec;
    for (const auto& f : schema()) {
        if (f.section != sec) {
            out += (sec.empty() ? "" : "\n") + std::string("[") + f.section + "]\n";
            sec = f.section;
        }
        out += f.key + " = " + f.get(c) + "\n";
    }
    return out;
}

std::string config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : echo(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace landau::cli
