#include "landau/cli/commands.hpp"

#include "landau/cli/output.hpp"
#include "landau/echo.hpp"
#include "landau/errors.hpp"
#include "landau/linear.hpp"
#include "landau/nonlinear.hpp"
#include "landau/norms.hpp"
#include "landau/penrose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace landau::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    const ExperimentConfig& cfg;
    const RunOptions& opts;
    std::ostream& log;
    fs::path out;
    std::string hash;
    bool csv = true;
    bool json_out = true;
};

json header(const Context& cx, const std::string& command) {
    json j;
    j["schema_version"] = schema_version;
    j["command"] = command;
    j["config_hash"] = cx.hash;
    j["seed"] = cx.opts.seed;
    j["status"] = "ok";
    return j;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json root_json(const penrose::Root& r) {
    return {{"k", r.k}, {"lambda", cplx_json(r.lambda)}, {"residual", r.residual}, {"iterations", r.iterations}};
}

json winding_json(const penrose::Winding& w) {
    return {{"k", w.k},
            {"rect", {w.rect.re_lo, w.rect.re_hi, w.rect.im_lo, w.rect.im_hi}},
            {"count", w.count},
            {"raw", w.raw},
            {"min_abs_d", w.min_abs_d}};
}

std::optional<penrose::Root> least_damped_root(const Equilibrium& eq, int k) {
    if (eq.is_free()) return std::nullopt;
    const penrose::Rect box{-0.9 * eq.theta0() * k, 2.0, 0.0, 2.0 + 2.0 * k};
    try {
        return penrose::find_root(eq, k, penrose::coarse_seed(eq, k, box));
    } catch (const Error&) {
        return std::nullopt;
    }
}

// certified strip width, or nullopt with the reason in `why`
std::optional<double> certified_theta1(const Equilibrium& eq, int k_scan, std::string& why) {
    if (eq.is_free()) return 0.5 * eq.theta0();
    try {
        return penrose::strip_width(eq, k_scan).theta1;
    } catch (const StabilityError& e) {
        why = e.what();
        return std::nullopt;
    }
}

int cmd_penrose(Context& cx) {
    const auto& c = cx.cfg;
    const Equilibrium eq = c.equilibrium.make();
    json j = header(cx, "penrose");
    j["equilibrium"] = eq.name();

    const auto m = penrose::margin(eq, c.penrose.k_scan, c.penrose.omega_max, c.penrose.n_omega);
    json mj = {{"kappa0", m.kappa0},     {"k_min", m.k_min},   {"omega_min", m.omega_min},
               {"scan_min", m.scan_min}, {"tail_k", m.tail_k}, {"tail_omega", m.tail_omega},
               {"C1", m.C1}};
    mj["windings"] = json::array();
    for (const auto& w : m.windings) mj["windings"].push_back(winding_json(w));
    mj["unstable_root"] = m.unstable ? root_json(*m.unstable) : json(nullptr);
    j["margin"] = mj;
    cx.log << "kappa0 = " << m.kappa0 << "\n";

    std::vector<penrose::Winding> windings = m.windings;
    if (m.kappa0 > 0.0) {
        try {
            const auto s = penrose::strip_width(eq, c.penrose.k_scan);
            json sj = {{"theta1", s.theta1}, {"k_tail", s.k_tail}, {"C1", s.C1}, {"bisection_steps", s.bisection_steps}};
            sj["windings"] = json::array();
            for (const auto& w : s.windings) sj["windings"].push_back(winding_json(w));
            j["strip"] = sj;
            windings.insert(windings.end(), s.windings.begin(), s.windings.end());
            cx.log << "theta1 = " << s.theta1 << "\n";
        } catch (const StabilityError& e) {
            j["strip"] = nullptr;
            j["strip_error"] = e.what();
        }
    } else {
        j["strip"] = nullptr;
    }

    j["roots"] = json::array();
    for (int k = 1; k <= c.penrose.roots; ++k)
        if (auto r = least_damped_root(eq, k)) j["roots"].push_back(root_json(*r));

    if (cx.csv) {
        CsvWriter w(cx.out / "penrose_windings.csv", cx.hash,
                    {"k", "re_lo", "re_hi", "im_lo", "im_hi", "count", "raw", "min_abs_d"});
        for (const auto& x : windings)
            w.row({double(x.k), x.rect.re_lo, x.rect.re_hi, x.rect.im_lo, x.rect.im_hi, double(x.count), x.raw,
                   x.min_abs_d});
    }
    if (cx.json_out) write_json(cx.out / "penrose.json", j);
    return exit_ok;
}

int cmd_linear(Context& cx) {
    const auto& c = cx.cfg;
    const Equilibrium eq = c.equilibrium.make();
    const InitialData f0 = c.initial.make(cx.opts.seed, c.grid.k_max);
    const double dt = c.time.dt, T = c.time.T;
    const std::size_t n = linear::step_count(dt, T);
    const bool use_volterra = c.linear.route != "kernel";
    const bool use_kernel = c.linear.route != "volterra";

    json j = header(cx, "linear");
    j["equilibrium"] = eq.name();
    std::optional<double> theta1;
    if (use_kernel) {
        std::string why;
        theta1 = certified_theta1(eq, c.penrose.k_scan, why);
        j["theta1"] = theta1 ? json(*theta1) : json(nullptr);
        if (!theta1) j["kernel_unavailable"] = why;
    }
    bool inconclusive = use_kernel && !use_volterra && !theta1;
    const bool both = use_volterra && use_kernel && theta1;

    std::unique_ptr<CsvWriter> trace_csv;
    if (cx.csv) {
        std::vector<std::string> cols{"t", "k", "re_rho", "im_rho", "abs_E", "re_S", "im_S"};
        if (both) cols.insert(cols.end(), {"re_rho_kernel", "im_rho_kernel"});
        trace_csv = std::make_unique<CsvWriter>(cx.out / "linear_trace.csv", cx.hash, cols);
    }
    std::vector<std::vector<cplx>> rho_all, S_all;

    j["modes"] = json::array();
    for (int k : c.linear.k_list) {
        const auto S = linear::sample_source([&](double t) { return f0.source(k, t); }, dt, n);
        json mj = {{"k", k}};
        std::optional<linear::DensityTrace> vt, kt;
        if (use_volterra) vt = linear::volterra_solve(eq, k, S, dt);
        if (use_kernel && theta1) {
            const auto K = linear::resolvent_kernel(eq, k, *theta1, dt, n);
            kt = linear::solve_via_kernel(S, K);
            mj["kernel"] = {{"theta_hat", K.theta_hat},     {"omega_max", K.omega_max}, {"n_quad", K.n_quad},
                            {"tail_estimate", K.tail_estimate}, {"C_fit", K.C_fit},       {"theta_fit", K.theta_fit},
                            {"noise_floor", K.noise_floor}, {"identity_residual", linear::resolvent_identity_residual(eq, K)}};
            if (cx.csv) {
                CsvWriter w(cx.out / ("resolvent_k" + std::to_string(k) + ".csv"), cx.hash, {"t", "K"});
                for (std::size_t i = 0; i < K.K.size(); i += static_cast<std::size_t>(c.time.stride))
                    w.row({K.t(i), K.K[i]});
            }
        }
        if (vt && kt) mj["route_difference"] = linear::max_difference(*vt, *kt);
        const linear::DensityTrace& tr = vt ? *vt : *kt;
        if (vt || kt) {
            const double t_end = c.linear.fit_end > 0.0 ? c.linear.fit_end : T;
            try {
                const auto f = linear::fit_decay(tr, c.linear.fit_gamma, c.linear.fit_start, t_end);
                mj["fit"] = {{"rate", f.rate},     {"log_amplitude", f.log_amplitude}, {"residual", f.residual},
                             {"points", f.points}, {"envelope", f.envelope},           {"gamma", c.linear.fit_gamma}};
            } catch (const DomainError& e) {
                mj["fit"] = nullptr;
                mj["fit_error"] = e.what();
            }
            if (auto r = least_damped_root(eq, k)) mj["root"] = root_json(*r);
            if (trace_csv) {
                for (std::size_t i = 0; i < tr.size(); i += static_cast<std::size_t>(c.time.stride)) {
                    std::vector<double> row{tr.t(i), double(k), tr.rho[i].real(), tr.rho[i].imag(), std::abs(tr.E(i)),
                                            S[i].real(), S[i].imag()};
                    if (both) {
                        row.push_back(kt->rho[i].real());
                        row.push_back(kt->rho[i].imag());
                    }
                    trace_csv->row(row);
                }
            }
            rho_all.push_back(tr.rho);
            S_all.push_back(S);
        }
        j["modes"].push_back(mj);
        cx.log << "linear k = " << k << " done\n";
    }
    // propagator bound along the traces at z = theta1 / 2
    if (theta1 && !rho_all.empty()) {
        std::vector<std::vector<cplx>> rho_k(static_cast<std::size_t>(*std::max_element(c.linear.k_list.begin(), c.linear.k_list.end())),
                                             std::vector<cplx>(rho_all.front().size()));
        auto S_k = rho_k;
        for (std::size_t q = 0; q < c.linear.k_list.size(); ++q) {
            rho_k[static_cast<std::size_t>(c.linear.k_list[q] - 1)] = rho_all[q];
            S_k[static_cast<std::size_t>(c.linear.k_list[q] - 1)] = S_all[q];
        }
        const auto pf = norms::propagator_fit(rho_k, S_k, dt, 0.5 * *theta1, *theta1, c.weights);
        j["propagator"] = {{"z", 0.5 * *theta1}, {"C", pf.C}, {"worst_t", pf.worst_t}};
    }
    if (inconclusive) j["status"] = "inconclusive";
    if (cx.json_out) write_json(cx.out / "linear.json", j);
    return inconclusive ? exit_inconclusive : exit_ok;
}

int cmd_nonlinear(Context& cx) {
    const auto& c = cx.cfg;
    nonlinear::RunConfig rc;
    rc.eq = c.equilibrium.make();
    rc.grid = c.grid;
    rc.dt = c.time.dt;
    rc.T = c.time.T;
    rc.f0 = c.initial.make(cx.opts.seed, c.grid.k_max);
    rc.record_stride = c.time.stride;
    rc.dense = c.nonlinear.dense;
    rc.couplings = {c.nonlinear.linear, c.nonlinear.quadratic, c.nonlinear.feedback};
    rc.check_stability = c.nonlinear.check_stability;

    const bool snaps = c.output.has("snapshots") && c.time.snapshot_stride > 0;
    const fs::path snap_dir = cx.out / "snapshots";
    if (snaps) fs::create_directories(snap_dir);
    long step = 0;
    const long every = snaps ? c.time.snapshot_stride / c.time.stride : 0;
    auto observer = [&](const SpectralState& s, const std::vector<cplx>&) {
        if (snaps && step % every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%08ld.bin", step * c.time.stride);
            write_snapshot(snap_dir / name, s, cx.hash);
        }
        ++step;
    };
    const auto r = nonlinear::run(rc, observer);

    json j = header(cx, "nonlinear");
    j["equilibrium"] = rc.eq.name();
    double sup_E = 0.0;
    for (const auto& tr : r.traces) sup_E = std::max(sup_E, std::abs(tr.E(tr.size() - 1)));
    j["sup_E_final"] = sup_E;
    j["mass_drift"] = r.log.mass_drift();
    j["l2_drift"] = r.log.l2_drift();
    j["l2_relative_drift"] = r.log.l2_relative_drift();
    j["max_reality_drift"] = r.log.max_reality_drift();
    j["max_dropped"] = r.log.dropped.empty() ? 0.0 : *std::max_element(r.log.dropped.begin(), r.log.dropped.end());
    j["spectral_floor"] = r.spectral_floor;
    j["closure_residual"] = r.closure_residual >= 0.0 ? json(r.closure_residual) : json(nullptr);
    j["closure_scale"] = r.closure_scale;
    j["snapshots"] = snaps ? json(step > 0 ? (step - 1) / every + 1 : 0) : json(0);
    try {
        const auto f = linear::fit_decay(r.traces.front(), c.linear.fit_gamma, c.linear.fit_start,
                                         c.linear.fit_end > 0.0 ? c.linear.fit_end : c.time.T);
        j["fit_k1"] = {{"rate", f.rate}, {"residual", f.residual}, {"points", f.points}, {"envelope", f.envelope}};
    } catch (const DomainError& e) {
        j["fit_k1"] = nullptr;
        j["fit_error"] = e.what();
    }

    if (cx.csv) {
        CsvWriter w(cx.out / "nonlinear_trace.csv", cx.hash, {"t", "k", "re_rho", "im_rho", "abs_E"});
        for (std::size_t i = 0; i < r.traces.front().size(); ++i)
            for (const auto& tr : r.traces)
                w.row({tr.t(i), double(tr.k), tr.rho[i].real(), tr.rho[i].imag(), std::abs(tr.E(i))});
        CsvWriter cw(cx.out / "conservation.csv", cx.hash, {"t", "mass", "l2", "reality_drift", "dropped"});
        for (std::size_t i = 0; i < r.log.t.size(); ++i)
            cw.row({r.log.t[i], r.log.mass[i], r.log.l2[i], r.log.reality_drift[i], r.log.dropped[i]});
    }
    if (cx.json_out) write_json(cx.out / "nonlinear.json", j);
    cx.log << "sup |E_k(T)| = " << sup_E << "\n";
    return exit_ok;
}

int cmd_echo(Context& cx) {
    const auto& c = cx.cfg;
    echo::EchoConfig ec;
    ec.eq = c.echo.mean_field ? c.equilibrium.make() : Equilibrium::free();
    ec.grid = c.grid;
    ec.dt = c.time.dt;
    ec.T = c.time.T;
    ec.k1 = c.echo.k1;
    ec.eta1 = c.echo.eta1;
    ec.eps1 = c.echo.eps1;
    ec.k2 = c.echo.k2;
    ec.eta2 = c.echo.eta2;
    ec.eps2 = c.echo.eps2;
    const auto rep = echo::echo_experiment(ec);

    json j = header(cx, "echo");
    j["equilibrium"] = ec.eq.name();
    j["noise_floor"] = rep.noise_floor;
    j["note"] = rep.note;
    j["peaks"] = json::array();
    for (const auto& p : rep.peaks)
        j["peaks"].push_back({{"k", p.k},
                              {"kind", p.kind},
                              {"predicted_t", p.predicted_t},
                              {"predicted_amp", p.predicted_amp},
                              {"measured_t", p.measured_t},
                              {"measured_amp", p.measured_amp},
                              {"rel_error", p.rel_error},
                              {"found", p.found}});
    if (rep.inconclusive) j["status"] = "inconclusive";
    if (cx.csv) {
        // kind: 0 primary, 1 echo, 2 secondary
        CsvWriter w(cx.out / "echo_peaks.csv", cx.hash,
                    {"k", "kind", "predicted_t", "measured_t", "predicted_amp", "measured_amp", "rel_error", "found"});
        for (const auto& p : rep.peaks)
            w.row({double(p.k), p.kind == "primary" ? 0.0 : p.kind == "echo" ? 1.0 : 2.0, p.predicted_t, p.measured_t,
                   p.predicted_amp, p.measured_amp, p.rel_error, p.found ? 1.0 : 0.0});
    }
    if (cx.json_out) write_json(cx.out / "echo.json", j);
    return rep.inconclusive ? exit_inconclusive : exit_ok;
}

int cmd_norms(Context& cx) {
    const auto& c = cx.cfg;
    const fs::path in = c.norms.input.empty() ? cx.out / "snapshots" : fs::path(c.norms.input);
    std::vector<fs::path> files;
    if (fs::is_directory(in))
        for (const auto& e : fs::directory_iterator(in))
            if (e.path().extension() == ".bin") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    json j = header(cx, "norms");
    j["input"] = in.string();
    j["snapshots"] = files.size();
    norms::ProfileBuilder pb(c.weights, norms::default_z_grid(c.weights, c.z_points));
    for (const auto& f : files) {
        const SpectralState s = read_snapshot(f);
        std::vector<cplx> rho(static_cast<std::size_t>(s.grid().k_max) + 1);
        for (int k = 1; k <= s.grid().k_max; ++k) rho[k] = spectral::oscillatory_moment(s, k, k * s.t());
        pb.add(s, rho);
    }
    const auto& pr = pb.profile();
    if (files.size() < 3) {
        j["status"] = "inconclusive";
        j["note"] = "need at least 3 snapshots for centered time differences";
        if (cx.json_out) write_json(cx.out / "norms.json", j);
        return exit_inconclusive;
    }

    const auto fg = norms::check_FG1(pr, c.weights);
    j["FG1"] = {{"C0", fg.C0},         {"t_tight", fg.t_tight}, {"z_tight", fg.z_tight},
                {"points", fg.points}, {"skipped", fg.skipped}, {"max_violation", norms::FG1_violation(pr, fg.C0)}};
    const auto cr = norms::check_contraction(pr.t, pr.F_at_lambda, c.weights, fg.C0);
    j["contraction"] = {{"holds", !cr.first_failure},
                        {"first_failure", cr.first_failure ? json(*cr.first_failure) : json(nullptr)},
                        {"worst", cr.worst}};
    const auto dc = norms::check_decay(pr.t, pr.F_at_lambda, c.norms.eps, c.weights);
    j["decay"] = {{"holds", dc.holds},
                  {"worst_ratio", dc.worst_ratio},
                  {"worst_t", dc.worst_t},
                  {"first_passage", dc.first_passage ? json(*dc.first_passage) : json(nullptr)}};
    j["sqrtG_margin_min"] = *std::min_element(pr.sqrtG_margin_min.begin(), pr.sqrtG_margin_min.end());
    j["multiplier_margin_min"] = *std::min_element(pr.multiplier_min.begin(), pr.multiplier_min.end());
    j["spectral_floor"] = *std::max_element(pr.floor.begin(), pr.floor.end());
    j["edge_fraction_max"] = *std::max_element(pr.edge_fraction.begin(), pr.edge_fraction.end());

    if (cx.csv) {
        CsvWriter w(cx.out / "norms_profile.csv", cx.hash, {"t", "z", "G", "F", "lambda"});
        for (std::size_t i = 0; i < pr.t.size(); ++i)
            for (std::size_t q = 0; q < pr.z.size(); ++q) w.row({pr.t[i], pr.z[q], pr.G[i][q], pr.F[i][q], pr.lambda[i]});
        CsvWriter m(cx.out / "norms_margins.csv", cx.hash,
                    {"t", "lambda", "F_at_lambda", "G_at_lambda", "sqrtG_margin_min", "multiplier_margin_min", "floor",
                     "edge_fraction"});
        for (std::size_t i = 0; i < pr.t.size(); ++i)
            m.row({pr.t[i], pr.lambda[i], pr.F_at_lambda[i], pr.G_at_lambda[i], pr.sqrtG_margin_min[i],
                   pr.multiplier_min[i], pr.floor[i], pr.edge_fraction[i]});
    }
    if (cx.json_out) write_json(cx.out / "norms.json", j);
    cx.log << "C0 = " << fg.C0 << ", contraction " << (cr.first_failure ? "fails" : "holds") << "\n";
    return exit_ok;
}

int cmd_report(Context& cx) {
    json j = header(cx, "report");
    j["reports"] = json::object();
    bool inconclusive = false;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(cx.out))
        if (e.path().extension() == ".json" && e.path().filename() != "report.json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        json r = read_json(f);
        if (r.value("status", "ok") == "inconclusive") inconclusive = true;
        cx.log << f.filename().string() << ": " << r.value("status", "?") << "\n";
        j["reports"][f.stem().string()] = std::move(r);
    }
    if (files.empty()) j["note"] = "no summaries found";
    if (inconclusive || files.empty()) j["status"] = "inconclusive";
    write_json(cx.out / "report.json", j);
    return inconclusive || files.empty() ? exit_inconclusive : exit_ok;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
    Context cx{cfg, opts, log, opts.out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(opts.out_dir),
               config_hash(cfg)};
    cx.csv = cfg.output.has("csv");
    cx.json_out = cfg.output.has("json");
    fs::create_directories(cx.out);
    {
        std::ofstream f(cx.out / "config.ini", std::ios::binary);
        f << "; config_hash=" << cx.hash << "\n" << echo(cfg);
    }
    if (command == "penrose") return cmd_penrose(cx);
    if (command == "linear") return cmd_linear(cx);
    if (command == "nonlinear") return cmd_nonlinear(cx);
    if (command == "echo") return cmd_echo(cx);
    if (command == "norms") return cmd_norms(cx);
    if (command == "report") return cmd_report(cx);
    throw DomainError("unknown command '" + command + "'");
}

}  // namespace landau::cli
