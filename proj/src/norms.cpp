#include "landau/norms.hpp"

#include "landau/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace landau::norms {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double floor_factor = 1e3;
constexpr double overflow_guard = 700.0;

double bracket_log(double k, double eta) { return 0.5 * std::log1p(k * k + eta * eta); }

void guard(const Grid& g, double z, const WeightParams& p) {
    const double b = std::pow(bracket(g.k_max, g.eta_max()), p.gamma);
    if (z * b >= overflow_guard) {
        std::ostringstream os;
        os << "weight overflow: z <k,eta_max>^gamma = " << z * b << " >= " << overflow_guard;
        throw DomainError(os.str());
    }
}

// log-sum-exp of log(a_i) + 2 z <k,eta>^gamma + 2 sigma log<k,eta> over the grid,
// with a_i supplied by `amp(k, m)`
template <class Amp>
double weighted_sum(const Grid& g, double z, const WeightParams& p, Amp amp) {
    const int N = g.n_v;
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> ex;
    ex.reserve(static_cast<std::size_t>(g.n_modes()) * N);
    for (int k = -g.k_max; k <= g.k_max; ++k) {
        for (int m = 0; m < N; ++m) {
            const double a = amp(k, m);
            if (a <= 0.0) continue;
            const double eta = g.eta(m);
            const double lb = bracket_log(k, eta);
            const double e = std::log(a) + 2.0 * z * std::exp(p.gamma * lb) + 2.0 * p.sigma * lb;
            ex.push_back(e);
            top = std::max(top, e);
        }
    }
    if (ex.empty()) return 0.0;
    double s = 0.0;
    for (double e : ex) s += std::exp(e - top);
    const double out = std::exp(top + std::log(s)) * g.deta();
    if (!std::isfinite(out)) throw DomainError("weighted sum overflows double range");
    return out;
}

std::size_t idx(const Grid& g, int k, int m) {
    return static_cast<std::size_t>(k + g.k_max) * static_cast<std::size_t>(g.n_v) + static_cast<std::size_t>(m);
}

}  // namespace

std::vector<std::string> WeightParams::violations() const {
    std::vector<std::string> out;
    auto fail = [&](const std::string& rule, double lhs, double rhs) {
        std::ostringstream os;
        os << rule << " (got " << lhs << " vs " << rhs << ")";
        out.push_back(os.str());
    };
    if (!(gamma > 1.0 / 3.0 && gamma <= 1.0)) fail("gamma in (1/3, 1]", gamma, 1.0);
    if (!(delta > 0.0)) fail("delta > 0", delta, 0.0);
    if (!(3.0 * gamma > 1.0 + 2.0 * delta)) fail("3γ > 1 + 2δ", 3.0 * gamma, 1.0 + 2.0 * delta);
    if (!(sigma > 3.0 + delta)) fail("σ > 3 + δ", sigma, 3.0 + delta);
    if (!(lambda0 > 0.0)) fail("λ₀ > 0", lambda0, 0.0);
    if (!(lambda0 <= lambda1 / 4.0)) fail("λ₀ ≤ λ₁/4", lambda0, lambda1 / 4.0);
    return out;
}

void WeightParams::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid weight parameters:";
    for (const auto& s : v) msg += "\n  " + s;
    throw DomainError(msg);
}

double weight(double k, double eta, double z, const WeightParams& p) {
    const double lb = bracket_log(k, eta);
    return std::exp(z * std::exp(p.gamma * lb) + p.sigma * lb);
}

double radius(double t, const WeightParams& p) { return p.lambda0 * (1.0 + std::pow(1.0 + t, -p.delta)); }

double radius_rate(double t, const WeightParams& p) {
    return -p.delta * p.lambda0 * std::pow(1.0 + t, -p.delta - 1.0);
}

std::vector<double> default_z_grid(const WeightParams& p, int n) {
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = p.lambda1 * i / (n - 1);
    return z;
}

EtaSpectrum spectrum(const SpectralState& s) {
    const Grid& g = s.grid();
    const int N = g.n_v;
    EtaSpectrum sp;
    sp.grid = g;
    sp.t = s.t();
    sp.g2.assign(static_cast<std::size_t>(g.n_modes()) * N, 0.0);
    sp.d2.assign(sp.g2.size(), 0.0);
    // rounding in the run and in the transform sits at ~eps relative to the
    // largest row, so the floor is global rather than per mode
    double l1 = 0.0, l1v = 0.0;
    for (int k = -g.k_max; k <= g.k_max; ++k) {
        const cplx* row = s.mode(k);
        double a = 0.0, b = 0.0;
        for (int j = 0; j < N; ++j) {
            a += std::abs(row[j]);
            b += std::abs(g.v(j)) * std::abs(row[j]);
        }
        l1 = std::max(l1, a * g.dv());
        l1v = std::max(l1v, b * g.dv());
    }
    if (l1 == 0.0) return sp;
    const double fg = floor_factor * eps * l1;
    const double fd = floor_factor * eps * l1v;
    for (int k = -g.k_max; k <= g.k_max; ++k) {
        const CVector gh = spectral::to_eta(s, k);
        const CVector dh = spectral::eta_derivative(s, k);
        for (int m = 0; m < N; ++m) {
            const double a = std::abs(gh[static_cast<std::size_t>(m)]);
            const double b = std::abs(dh[static_cast<std::size_t>(m)]);
            if (a > fg) sp.g2[idx(g, k, m)] = a * a;
            else sp.floor = std::max(sp.floor, a);
            if (b > fd) sp.d2[idx(g, k, m)] = b * b;
            else sp.floor = std::max(sp.floor, b);
        }
    }
    return sp;
}

double gen_G(const EtaSpectrum& sp, double z, const WeightParams& p) {
    if (z < 0.0) throw DomainError("gen_G: z must be >= 0");
    guard(sp.grid, z, p);
    return weighted_sum(sp.grid, z, p, [&](int k, int m) { return sp.g2[idx(sp.grid, k, m)] + sp.d2[idx(sp.grid, k, m)]; });
}

double gen_G(const SpectralState& s, double z, const WeightParams& p) { return gen_G(spectrum(s), z, p); }

double gen_F(const std::vector<cplx>& rho, double t, double z, const WeightParams& p) {
    double best = 0.0;
    for (std::size_t k = 1; k < rho.size(); ++k) {
        const double a = std::abs(rho[k]);
        if (a == 0.0) continue;
        const double kk = static_cast<double>(k);
        best = std::max(best, a * weight(kk, kk * t, z, p));
    }
    return best;
}

double gen_G_edge_fraction(const EtaSpectrum& sp, double z, const WeightParams& p, double frac) {
    const double total = gen_G(sp, z, p);
    if (total == 0.0) return 0.0;
    const Grid& g = sp.grid;
    const double cut = frac * g.eta_max();
    const double edge = weighted_sum(g, z, p, [&](int k, int m) {
        return std::abs(g.eta(m)) >= cut ? sp.g2[idx(g, k, m)] + sp.d2[idx(g, k, m)] : 0.0;
    });
    return edge / total;
}

double gen_G_multiplied(const EtaSpectrum& sp, double z, const WeightParams& p, bool velocity) {
    guard(sp.grid, z, p);
    const Grid& g = sp.grid;
    return weighted_sum(g, z, p, [&](int k, int m) {
        const double mult = velocity ? std::pow(std::abs(g.eta(m)), p.gamma) : std::pow(std::abs(k), p.gamma);
        return mult * (sp.g2[idx(g, k, m)] + sp.d2[idx(g, k, m)]);
    });
}

SqrtGMargin check_F_le_sqrtG(const EtaSpectrum& sp, const std::vector<cplx>& rho, double z, const WeightParams& p) {
    // density values below the spectrum's rounding floor are treated as zero,
    // matching what gen_G discards
    std::vector<cplx> r = rho;
    for (auto& x : r)
        if (std::abs(x) <= sp.floor) x = 0.0;
    SqrtGMargin out;
    out.F = gen_F(r, sp.t, z, p);
    out.sqrtG = std::sqrt(gen_G(sp, z, p));
    out.margin = out.sqrtG - out.F;
    out.tolerance = 1e-8;
    out.flagged = out.margin < -out.tolerance;
    return out;
}

MultiplierMargin check_multiplier(const EtaSpectrum& sp, double z, const WeightParams& p, double dz) {
    if (dz <= 0.0 || z - dz < 0.0) throw DomainError("check_multiplier: z must be interior (z - dz >= 0)");
    MultiplierMargin out;
    out.dGdz = (gen_G(sp, z + dz, p) - gen_G(sp, z - dz, p)) / (2.0 * dz);
    out.x_margin = out.dGdz - gen_G_multiplied(sp, z, p, false);
    out.v_margin = out.dGdz - gen_G_multiplied(sp, z, p, true);
    return out;
}

ProfileBuilder::ProfileBuilder(const WeightParams& p, std::vector<double> z_grid) : p_(p) {
    p_.validate();
    prof_.z = std::move(z_grid);
}

void ProfileBuilder::add(const SpectralState& s, const std::vector<cplx>& rho) {
    const EtaSpectrum sp = spectrum(s);
    const double t = s.t();
    const double lam = radius(t, p_);
    std::vector<cplx> r = rho;
    for (auto& x : r)
        if (std::abs(x) <= sp.floor) x = 0.0;

    std::vector<double> G(prof_.z.size()), F(prof_.z.size());
    for (std::size_t i = 0; i < prof_.z.size(); ++i) {
        G[i] = gen_G(sp, prof_.z[i], p_);
        F[i] = gen_F(r, t, prof_.z[i], p_);
    }
    double mmin = std::numeric_limits<double>::infinity();
    for (double z : {0.0, 0.5 * lam, lam}) mmin = std::min(mmin, check_F_le_sqrtG(sp, rho, z, p_).margin);
    const double dz = 1e-3 * lam;
    const MultiplierMargin mm = check_multiplier(sp, 0.5 * lam, p_, dz);

    prof_.t.push_back(t);
    prof_.lambda.push_back(lam);
    prof_.G.push_back(std::move(G));
    prof_.F.push_back(std::move(F));
    prof_.F_at_lambda.push_back(gen_F(r, t, lam, p_));
    prof_.G_at_lambda.push_back(gen_G(sp, lam, p_));
    prof_.sqrtG_margin_min.push_back(mmin);
    prof_.multiplier_min.push_back(std::min(mm.x_margin, mm.v_margin));
    prof_.floor.push_back(sp.floor);
    prof_.edge_fraction.push_back(gen_G_edge_fraction(sp, lam, p_));
}

namespace {

template <class Visit>
void fg1_points(const NormProfile& prof, Visit visit) {
    const std::size_t nt = prof.t.size(), nz = prof.z.size();
    if (nt < 3 || nz < 3) throw DomainError("check_FG1: need at least 3 snapshots and 3 z values");
    for (std::size_t i = 1; i + 1 < nt; ++i) {
        const double ht = prof.t[i + 1] - prof.t[i - 1];
        for (std::size_t j = 1; j + 1 < nz; ++j) {
            const double G = prof.G[i][j];
            const double dGt = (prof.G[i + 1][j] - prof.G[i - 1][j]) / ht;
            const double dGz = (prof.G[i][j + 1] - prof.G[i][j - 1]) / (prof.z[j + 1] - prof.z[j - 1]);
            const double R = prof.F[i][j] * std::sqrt(G) + (1.0 + prof.t[i]) * prof.F[i][j] * std::max(dGz, 0.0);
            // differences of G carry ~1e-12 relative rounding from the run
            const double noise = 1e-12 * G / ht;
            visit(i, j, dGt, R, noise);
        }
    }
}

}  // namespace

Fg1Result check_FG1(const NormProfile& prof, const WeightParams&) {
    Fg1Result out;
    fg1_points(prof, [&](std::size_t i, std::size_t j, double dGt, double R, double noise) {
        if (dGt <= noise) {
            ++out.skipped;
            return;
        }
        ++out.points;
        const double c = R > 0.0 ? dGt / R : std::numeric_limits<double>::infinity();
        if (c > out.C0) {
            out.C0 = c;
            out.t_tight = prof.t[i];
            out.z_tight = prof.z[j];
        }
    });
    return out;
}

double FG1_violation(const NormProfile& prof, double C0) {
    double worst = -std::numeric_limits<double>::infinity();
    fg1_points(prof, [&](std::size_t, std::size_t, double dGt, double R, double noise) {
        if (dGt <= noise) return;
        worst = std::max(worst, dGt - C0 * R);
    });
    return std::isfinite(worst) ? worst : 0.0;
}

ContractionResult check_contraction(const std::vector<double>& t, const std::vector<double>& F_at_lambda,
                                    const WeightParams& p, double C0) {
    ContractionResult out;
    out.worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double v = radius_rate(t[i], p) + C0 * (1.0 + t[i]) * F_at_lambda[i];
        const bool ok = v <= 0.0;
        out.holds.push_back(ok);
        if (!ok && !out.first_failure) out.first_failure = t[i];
        out.worst = std::max(out.worst, v);
    }
    return out;
}

DecayCheck check_decay(const std::vector<double>& t, const std::vector<double>& F_at_lambda, double eps_amp,
                       const WeightParams& p) {
    DecayCheck out;
    std::optional<double> last_fail;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double bound = std::sqrt(eps_amp) * std::pow(std::sqrt(1.0 + t[i] * t[i]), 1.0 - p.sigma);
        const double r = F_at_lambda[i] / bound;
        if (r > out.worst_ratio) {
            out.worst_ratio = r;
            out.worst_t = t[i];
        }
        if (r > 1.0) {
            out.holds = false;
            last_fail = t[i];
        }
    }
    if (!last_fail) out.first_passage = t.size() > 1 ? t[1] : 0.0;
    else {
        for (std::size_t i = 1; i < t.size(); ++i)
            if (t[i] > *last_fail) {
                out.first_passage = t[i];
                break;
            }
    }
    return out;
}

PropagatorFit propagator_fit(const std::vector<std::vector<cplx>>& rho, const std::vector<std::vector<cplx>>& S,
                             double dt, double z, double theta1, const WeightParams& p) {
    if (rho.size() != S.size() || rho.empty()) throw DomainError("propagator_fit: mismatched traces");
    if (z > 0.5 * theta1 + 1e-15) throw DomainError("propagator_fit: z must be <= theta1/2");
    const std::size_t n = rho.front().size();
    const std::size_t K = rho.size();
    auto F_at = [&](const std::vector<std::vector<cplx>>& tr, std::size_t i) {
        std::vector<cplx> r(K + 1);
        for (std::size_t k = 0; k < K; ++k) r[k + 1] = tr[k][i];
        return gen_F(r, static_cast<double>(i) * dt, z, p);
    };
    PropagatorFit out;
    const double decay = std::exp(-0.25 * theta1 * dt);
    double I = 0.0;
    double Fs_prev = F_at(S, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const double Fs = F_at(S, i);
        I = decay * I + 0.5 * dt * (decay * Fs_prev + Fs);
        Fs_prev = Fs;
        const double excess = F_at(rho, i) - Fs;
        if (excess <= 0.0 || I <= 0.0) continue;
        const double c = excess / I;
        if (c > out.C) {
            out.C = c;
            out.worst_t = static_cast<double>(i) * dt;
        }
    }
    return out;
}

}  // namespace landau::norms
