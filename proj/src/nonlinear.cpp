#include "landau/nonlinear.hpp"

#include "landau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace landau::nonlinear {
namespace {

void check_resolution(const Grid& g, double a) {
    if (std::abs(a) * g.dv() >= pi) {
        std::ostringstream msg;
        msg << "phase rate " << a << " not resolved: N_v=" << g.n_v << " on [-" << g.V << "," << g.V << ")";
        throw ResolutionError(msg.str(), required_nv(g.V, a));
    }
}

// row pointers for the positive half k = 0..k_max of a state
std::size_t half_offset(const Grid& g) { return static_cast<std::size_t>(g.k_max) * g.n_v; }

}  // namespace

std::vector<cplx> field(const std::vector<cplx>& rho) {
    std::vector<cplx> E(rho.size(), cplx{0.0, 0.0});
    for (std::size_t k = 1; k < rho.size(); ++k) E[k] = rho[k] / cplx{0.0, static_cast<double>(k)};
    return E;
}

Solver::Solver(const Equilibrium& eq, const Grid& grid, Couplings c)
    : eq_(eq), grid_(grid), c_(c), k1_(grid), k2_(grid), k3_(grid), k4_(grid), tmp_(grid) {
    grid.validate();
    dmu_.resize(grid.n_v);
    for (int j = 0; j < grid.n_v; ++j) dmu_[j] = eq.dmu(grid.v(j));
    phase_.assign(grid.k_max + 1, CVector(grid.n_v));
    dg_.assign(grid.k_max + 1, CVector(grid.n_v));
}

void Solver::phases(double t) {
    const int n = grid_.n_v;
    CVector& base = phase_[std::min(1, grid_.k_max)];
    for (int j = 0; j < n; ++j) {
        phase_[0][j] = 1.0;
        base[j] = std::polar(1.0, grid_.v(j) * t);
    }
    for (int l = 2; l <= grid_.k_max; ++l)
        for (int j = 0; j < n; ++j) phase_[l][j] = phase_[l - 1][j] * base[j];
}

std::vector<cplx> Solver::density(const SpectralState& s, double t) {
    const int K = grid_.k_max;
    check_resolution(grid_, K * t);
    phases(t);
    std::vector<cplx> rho(K + 1, cplx{0.0, 0.0});
    const double dv = grid_.dv();
    for (int k = 1; k <= K; ++k) {
        const cplx* g = s.mode(k);
        const cplx* p = phase_[k].data();
        double re = 0.0, im = 0.0;
        for (int j = 0; j < grid_.n_v; ++j) {
            // g * conj(p)
            re += g[j].real() * p[j].real() + g[j].imag() * p[j].imag();
            im += g[j].imag() * p[j].real() - g[j].real() * p[j].imag();
        }
        rho[k] = cplx{re, im} * dv;
    }
    return rho;
}

void Solver::rhs(const SpectralState& s, double t, SpectralState& out) {
    const int K = grid_.k_max;
    const int n = grid_.n_v;
    std::fill(out.data().begin(), out.data().end(), cplx{0.0, 0.0});
    out.set_t(t);
    last_emax_ = 0.0;
    if (!c_.feedback) return;
    const std::vector<cplx> E = field(density(s, t));
    last_emax_ = 0.0;
    for (const cplx& e : E) last_emax_ = std::max(last_emax_, std::abs(e));

    if (c_.quadratic) {
        for (int m = 0; m <= K; ++m) {
            spectral::v_derivative(grid_, s.mode(m), dg_[m].data());
            const cplx shift{0.0, -m * t};
            const cplx* g = s.mode(m);
            for (int j = 0; j < n; ++j) dg_[m][j] += shift * g[j];
        }
    }

#pragma omp parallel for schedule(static)
    for (int k = 0; k <= K; ++k) {
        cplx* o = out.mode(k);
        if (c_.linear && k != 0) {
            const cplx* p = phase_[k].data();
            for (int j = 0; j < n; ++j) o[j] -= E[k] * p[j] * dmu_[j];
        }
        if (!c_.quadratic) continue;
        for (int l = -K; l <= K; ++l) {
            const int m = k - l;
            if (l == 0 || m < -K || m > K) continue;
            const bool lc = l < 0, mc = m < 0;
            const cplx El = lc ? std::conj(E[-l]) : E[l];
            const cplx* p = phase_[lc ? -l : l].data();
            const cplx* d = dg_[mc ? -m : m].data();
            if (!lc && !mc) {
                for (int j = 0; j < n; ++j) o[j] -= El * (p[j] * d[j]);
            } else if (lc && !mc) {
                for (int j = 0; j < n; ++j) o[j] -= El * (std::conj(p[j]) * d[j]);
            } else if (!lc && mc) {
                for (int j = 0; j < n; ++j) o[j] -= El * (p[j] * std::conj(d[j]));
            } else {
                for (int j = 0; j < n; ++j) o[j] -= El * std::conj(p[j] * d[j]);
            }
        }
    }
    for (int k = 1; k <= K; ++k) {
        const cplx* a = out.mode(k);
        cplx* b = out.mode(-k);
        for (int j = 0; j < n; ++j) b[j] = std::conj(a[j]);
    }
}

double Solver::step(SpectralState& s, double dt) {
    const double t = s.t();
    const std::size_t off = half_offset(grid_);
    auto& g = s.data();
    auto axpy = [&](SpectralState& dst, const SpectralState& inc, double a) {
        auto& d = dst.data();
        const auto& x = inc.data();
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] + a * x[i];
    };

    rhs(s, t, k1_);
    if (check_stability && c_.feedback) {
        const double emax = last_emax_;
        const double q = dt * grid_.k_max * (1.0 + t) * emax;
        if (q >= 0.5) {
            const double suggested = 0.25 / (grid_.k_max * (1.0 + t) * emax);
            std::ostringstream msg;
            msg << "step: dt k_max (1+t) max|E| = " << q << " >= 0.5 at t=" << t << "; use dt <= " << suggested;
            throw StabilityError(msg.str(), suggested);
        }
    }
    axpy(tmp_, k1_, 0.5 * dt);
    rhs(tmp_, t + 0.5 * dt, k2_);
    axpy(tmp_, k2_, 0.5 * dt);
    rhs(tmp_, t + 0.5 * dt, k3_);
    axpy(tmp_, k3_, dt);
    rhs(tmp_, t + dt, k4_);
    const double c = dt / 6.0;
    const auto& a1 = k1_.data();
    const auto& a2 = k2_.data();
    const auto& a3 = k3_.data();
    const auto& a4 = k4_.data();
    for (std::size_t i = off; i < g.size(); ++i) g[i] += c * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
    s.set_t(t + dt);
    // only k >= 0 is evolved; the reality defect that can build up is Im g_0
    double drift = 0.0;
    const cplx* g0 = s.mode(0);
    for (int j = 0; j < grid_.n_v; ++j) drift = std::max(drift, std::abs(g0[j].imag()));
    const double p = s.peak();
    s.symmetrize();
    return p > 0.0 ? drift / p : 0.0;
}

double Solver::dropped_magnitude(const SpectralState& s, double t) {
    if (!c_.quadratic || !c_.feedback) return 0.0;
    const int K = grid_.k_max;
    const int n = grid_.n_v;
    const std::vector<cplx> E = field(density(s, t));
    for (int m = 0; m <= K; ++m) {
        spectral::v_derivative(grid_, s.mode(m), dg_[m].data());
        const cplx shift{0.0, -m * t};
        const cplx* g = s.mode(m);
        for (int j = 0; j < n; ++j) dg_[m][j] += shift * g[j];
    }
    double worst = 0.0;
    CVector acc(n);
    for (int k = K + 1; k <= 2 * K; ++k) {
        std::fill(acc.begin(), acc.end(), cplx{0.0, 0.0});
        for (int l = k - K; l <= K; ++l) {
            const int m = k - l;
            for (int j = 0; j < n; ++j) acc[j] += E[l] * phase_[l][j] * dg_[m][j];
        }
        for (const cplx& z : acc) worst = std::max(worst, std::abs(z));
    }
    return worst;
}

double ConservationLog::mass_drift() const {
    double d = 0.0;
    for (double m : mass) d = std::max(d, std::abs(m - mass.front()));
    return d;
}

double ConservationLog::l2_drift() const {
    double d = 0.0;
    for (double x : l2) d = std::max(d, std::abs(x - l2.front()));
    return d;
}

double ConservationLog::l2_relative_drift() const {
    return l2.empty() || l2.front() == 0.0 ? 0.0 : l2_drift() / l2.front();
}

double ConservationLog::max_reality_drift() const {
    double d = 0.0;
    for (double x : reality_drift) d = std::max(d, x);
    return d;
}

ClosureTracker::ClosureTracker(const Equilibrium& eq, const SpectralState& initial, bool quadratic, double dt)
    : eq_(eq), grid_(initial.grid()), quadratic_(quadratic), dt_(dt), initial_(initial) {
    const int K = grid_.k_max;
    rho_hist_.assign(K + 1, {});
    A_.assign(K + 1, CVector(grid_.n_v, cplx{0.0, 0.0}));
    B_ = A_;
    prevA_ = A_;
    prevB_ = A_;
}

void ClosureTracker::push(const SpectralState& s, const std::vector<cplx>& rho) {
    const int K = grid_.k_max;
    const int nv = grid_.n_v;
    const double t = n_ * dt_;
    const double dv = grid_.dv();

    std::vector<CVector> P(K + 1, CVector(nv));
    for (int j = 0; j < nv; ++j) {
        P[0][j] = 1.0;
        if (K >= 1) P[1][j] = std::polar(1.0, grid_.v(j) * t);
    }
    for (int l = 2; l <= K; ++l)
        for (int j = 0; j < nv; ++j) P[l][j] = P[l - 1][j] * P[1][j];

    if (quadratic_) {
        CVector I(nv);
        for (int k = 1; k <= K; ++k) {
            std::fill(I.begin(), I.end(), cplx{0.0, 0.0});
            for (int l = -K; l <= K; ++l) {
                const int m = k - l;
                if (l == 0 || m < -K || m > K) continue;
                const cplx rl = l > 0 ? rho[l] : std::conj(rho[-l]);
                const cplx c = (static_cast<double>(k) / l) * rl;
                const cplx* g = s.mode(m);
                const cplx* p = P[l > 0 ? l : -l].data();
                if (l > 0)
                    for (int j = 0; j < nv; ++j) I[j] += c * g[j] * p[j];
                else
                    for (int j = 0; j < nv; ++j) I[j] += c * g[j] * std::conj(p[j]);
            }
            for (int j = 0; j < nv; ++j) {
                if (n_ > 0) {
                    A_[k][j] += 0.5 * dt_ * (prevA_[k][j] + I[j]);
                    B_[k][j] += 0.5 * dt_ * (prevB_[k][j] + t * I[j]);
                }
                prevA_[k][j] = I[j];
                prevB_[k][j] = t * I[j];
            }
        }
    }

    for (int k = 1; k <= K; ++k) {
        auto& h = rho_hist_[k];
        h.push_back(rho[k]);
        auto ker = [&](int m) {
            const double tau = m * dt_;
            return tau * eq_.mu_hat(k * tau);
        };
        cplx vol{0.0, 0.0};
        if (n_ > 0 && !eq_.is_free()) {
            vol = 0.5 * ker(n_) * h[0];
            for (int j = 1; j < n_; ++j) vol += ker(n_ - j) * h[j];
            vol *= dt_;
        }
        const cplx* g0 = initial_.mode(k);
        cplx f0{0.0, 0.0}, q{0.0, 0.0};
        for (int j = 0; j < nv; ++j) {
            const cplx pc = std::conj(P[k][j]);
            f0 += g0[j] * pc;
            if (quadratic_) q += (t * A_[k][j] - B_[k][j]) * pc;
        }
        const cplx res = rho[k] + vol - f0 * dv + q * dv;
        worst_ = std::max(worst_, std::abs(res));
    }
    ++n_;
}

RunResult run(const RunConfig& cfg, const Observer& observer) {
    const Grid& g = cfg.grid;
    g.validate();
    const std::size_t n_steps = linear::step_count(cfg.dt, cfg.T);
    if (cfg.record_stride < 1) throw DomainError("run: record_stride must be >= 1");
    check_resolution(g, g.k_max * cfg.T + cfg.f0.max_eta_offset());

    SpectralState state = cfg.f0.to_state(g);
    for (int k = -g.k_max; k <= g.k_max; ++k) spectral::check_boundary(state, k);

    Solver solver(cfg.eq, g, cfg.couplings);
    solver.check_stability = cfg.check_stability;

    RunResult out;
    out.traces.resize(g.k_max);
    for (int k = 1; k <= g.k_max; ++k) {
        out.traces[k - 1].k = k;
        out.traces[k - 1].dt = cfg.dt * cfg.record_stride;
    }
    std::unique_ptr<ClosureTracker> closure;
    if (cfg.dense) closure = std::make_unique<ClosureTracker>(cfg.eq, state, cfg.couplings.quadratic, cfg.dt);

    double drift = 0.0;
    auto record = [&](std::size_t n, const std::vector<cplx>& rho) {
        const double t = state.t();
        for (int k = 1; k <= g.k_max; ++k) out.traces[k - 1].rho.push_back(rho[k]);
        const cplx* g0 = state.mode(0);
        double mass = 0.0;
        for (int j = 0; j < g.n_v; ++j) mass += g0[j].real();
        double l2 = 0.0;
        for (const cplx& z : state.data()) l2 += std::norm(z);
        out.log.t.push_back(t);
        out.log.mass.push_back(mass * g.dv());
        out.log.l2.push_back(l2 * g.dv());
        out.log.reality_drift.push_back(drift);
        out.log.dropped.push_back(solver.dropped_magnitude(state, t));
        for (const cplx& z : rho) out.closure_scale = std::max(out.closure_scale, std::abs(z));
        if (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0) out.snapshots.push_back(state);
        if (observer) observer(state, rho);
    };

    state.set_t(0.0);
    std::vector<cplx> rho = solver.density(state, 0.0);
    if (closure) closure->push(state, rho);
    record(0, rho);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        drift = solver.step(state, cfg.dt);
        state.set_t(static_cast<double>(n) * cfg.dt);
        const bool rec = n % cfg.record_stride == 0;
        if (closure || rec) rho = solver.density(state, state.t());
        if (closure) closure->push(state, rho);
        if (rec) record(n, rho);
    }
    out.final_state = state;
    out.spectral_floor = spectral::spectral_floor(state);
    if (closure) out.closure_residual = closure->max_residual();
    return out;
}

}  // namespace landau::nonlinear
