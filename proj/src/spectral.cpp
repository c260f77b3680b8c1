#include "landau/spectral.hpp"

#include "landau/errors.hpp"
#include "landau/fft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace landau {

void Grid::validate() const {
    std::ostringstream err;
    if (k_max < 1) err << "k_max must be >= 1; ";
    if (!(V > 0.0)) err << "V must be positive; ";
    if (n_v < 2 || n_v % 2 != 0) err << "N_v must be even and >= 2; ";
    if (!err.str().empty()) throw DomainError("grid: " + err.str());
}

int required_nv(double V, double a) {
    // need |a| * 2V / N < pi  =>  N > 2V|a|/pi
    int n = static_cast<int>(std::floor(2.0 * V * std::abs(a) / pi)) + 1;
    if (n % 2) ++n;
    return std::max(n, 2);
}

SpectralState::SpectralState(const Grid& g, double t) : grid_(g), t_(t) {
    g.validate();
    data_.assign(static_cast<std::size_t>(g.n_modes()) * g.n_v, cplx{0.0, 0.0});
}

std::size_t SpectralState::index(int k) const {
    if (k < -grid_.k_max || k > grid_.k_max) throw DomainError("mode index out of range");
    return static_cast<std::size_t>(k + grid_.k_max) * grid_.n_v;
}

double SpectralState::peak() const {
    double p = 0.0;
    for (const cplx& z : data_) p = std::max(p, std::abs(z));
    return p;
}

double SpectralState::reality_defect() const {
    double d = 0.0;
    for (int k = 0; k <= grid_.k_max; ++k) {
        const cplx* a = mode(k);
        const cplx* b = mode(-k);
        for (int j = 0; j < grid_.n_v; ++j) d = std::max(d, std::abs(b[j] - std::conj(a[j])));
    }
    const double p = peak();
    return p > 0.0 ? d / p : 0.0;
}

double SpectralState::symmetrize() {
    const double d = reality_defect();
    cplx* g0 = mode(0);
    for (int j = 0; j < grid_.n_v; ++j) g0[j] = cplx{g0[j].real(), 0.0};
    for (int k = 1; k <= grid_.k_max; ++k) {
        const cplx* a = mode(k);
        cplx* b = mode(-k);
        for (int j = 0; j < grid_.n_v; ++j) b[j] = std::conj(a[j]);
    }
    return d;
}

bool SpectralState::finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

namespace spectral {

double spectral_floor(const SpectralState& s) {
    const Grid& g = s.grid();
    double f = 0.0;
    for (int k = -g.k_max; k <= g.k_max; ++k) {
        const cplx* row = s.mode(k);
        f = std::max({f, std::abs(row[0]), std::abs(row[g.n_v - 1])});
    }
    return f;
}

void check_boundary(const SpectralState& s, int k) {
    const Grid& g = s.grid();
    const cplx* row = s.mode(k);
    const double edge = std::max(std::abs(row[0]), std::abs(row[g.n_v - 1]));
    const double p = s.peak();
    if (p > 0.0 && edge > boundary_tol * p) {
        std::ostringstream msg;
        msg << "mode k=" << k << " not decayed at |v|=V: |g_k| = " << edge << " (peak " << p << ")";
        throw BoundaryDecayError(msg.str(), k, edge);
    }
}

CVector to_eta(const Grid& g, const cplx* row) {
    const int n = g.n_v;
    CVector tmp(n), out(n);
    for (int j = 0; j < n; ++j) tmp[j] = (j % 2 ? -row[j] : row[j]);
    fft::transform(tmp.data(), out.data(), n, -1);
    const double dv = g.dv();
    for (int m = 0; m < n; ++m) out[m] *= ((m - n / 2) % 2 ? -dv : dv);
    return out;
}

CVector from_eta(const Grid& g, const cplx* eta_row) {
    const int n = g.n_v;
    CVector tmp(n), out(n);
    for (int m = 0; m < n; ++m) tmp[m] = ((m - n / 2) % 2 ? -eta_row[m] : eta_row[m]);
    fft::transform(tmp.data(), out.data(), n, +1);
    const double c = g.deta() / (2.0 * pi);
    for (int j = 0; j < n; ++j) out[j] *= (j % 2 ? -c : c);
    return out;
}

void v_derivative(const Grid& g, const cplx* row, cplx* out) {
    CVector h = to_eta(g, row);
    h[0] = 0.0;  // Nyquist
    for (int m = 1; m < g.n_v; ++m) h[m] *= cplx{0.0, g.eta(m)};
    CVector d = from_eta(g, h.data());
    std::copy(d.begin(), d.end(), out);
}

cplx moment(const Grid& g, const cplx* row, double a) {
    if (std::abs(a) * g.dv() >= pi) {
        std::ostringstream msg;
        msg << "phase rate " << a << " not resolved by N_v=" << g.n_v << " on [-" << g.V << "," << g.V << ")";
        throw ResolutionError(msg.str(), required_nv(g.V, a));
    }
    const double dv = g.dv();
    // e^{-i a v_j} by a rotating phase; reset from polar form every 64 nodes
    // to keep the accumulated rounding at the level of a few ulps
    const cplx step = std::polar(1.0, -a * dv);
    cplx ph;
    cplx sum{0.0, 0.0};
    for (int j = 0; j < g.n_v; ++j) {
        if (j % 64 == 0)
            ph = std::polar(1.0, -a * g.v(j));
        else
            ph *= step;
        sum += row[j] * ph;
    }
    return sum * dv;
}

CVector to_eta(const SpectralState& s, int k) {
    check_boundary(s, k);
    return to_eta(s.grid(), s.mode(k));
}

CVector eta_derivative(const SpectralState& s, int k) {
    check_boundary(s, k);
    const Grid& g = s.grid();
    const cplx* row = s.mode(k);
    CVector w(g.n_v);
    for (int j = 0; j < g.n_v; ++j) w[j] = cplx{0.0, -g.v(j)} * row[j];
    return to_eta(g, w.data());
}

cplx oscillatory_moment(const SpectralState& s, int k, double a) {
    check_boundary(s, k);
    return moment(s.grid(), s.mode(k), a);
}

}  // namespace spectral
}  // namespace landau
