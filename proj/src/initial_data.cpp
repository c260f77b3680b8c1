#include "landau/initial_data.hpp"

#include "landau/errors.hpp"

#include <algorithm>
#include <cmath>

namespace landau {

InitialData InitialData::single(int k, double amplitude, double eta_offset) {
    InitialData d;
    d.modes.push_back({k, eta_offset, amplitude});
    return d;
}

cplx InitialData::f_hat(int k, double eta) const {
    if (k == 0) return 0.0;
    // negative modes by the reality condition f_hat(-k, eta) = conj f_hat(k, -eta)
    const bool neg = k < 0;
    const int kk = neg ? -k : k;
    const double e = neg ? -eta : eta;
    double sum = 0.0;
    for (const ModeSpec& m : modes) {
        if (m.k != kk) continue;
        const double d = e - m.eta_offset;
        if (profile == Profile::Gaussian)
            sum += 0.5 * m.amplitude * std::exp(-0.5 * d * d);
        else
            sum += 0.5 * m.amplitude * std::exp(-gevrey_lambda * std::pow(bracket(kk, d), gevrey_gamma));
    }
    return sum;  // real for these profiles; conjugation is a no-op
}

int InitialData::max_k() const {
    int k = 0;
    for (const ModeSpec& m : modes) k = std::max(k, m.k);
    return k;
}

double InitialData::max_eta_offset() const {
    double e = 0.0;
    for (const ModeSpec& m : modes) e = std::max(e, std::abs(m.eta_offset));
    return e;
}

SpectralState InitialData::to_state(const Grid& g) const {
    for (const ModeSpec& m : modes)
        if (m.k < 1) throw DomainError("initial data: mode numbers must be >= 1");
    SpectralState s(g, 0.0);
    if (profile == Profile::Gaussian) {
        const double norm = 1.0 / std::sqrt(2.0 * pi);
        for (const ModeSpec& m : modes) {
            if (m.k > g.k_max) continue;
            cplx* row = s.mode(m.k);
            for (int j = 0; j < g.n_v; ++j) {
                const double v = g.v(j);
                row[j] += 0.5 * m.amplitude * norm * std::exp(-0.5 * v * v) * std::polar(1.0, m.eta_offset * v);
            }
        }
    } else {
        for (int k = 1; k <= g.k_max; ++k) {
            CVector h(g.n_v);
            for (int m = 0; m < g.n_v; ++m) h[m] = f_hat(k, g.eta(m));
            const CVector row = spectral::from_eta(g, h.data());
            std::copy(row.begin(), row.end(), s.mode(k));
        }
    }
    for (int k = 1; k <= g.k_max; ++k) {
        const cplx* a = s.mode(k);
        cplx* b = s.mode(-k);
        for (int j = 0; j < g.n_v; ++j) b[j] = std::conj(a[j]);
    }
    return s;
}

InitialData::Profile InitialData::parse_profile(const std::string& name) {
    if (name == "gaussian") return Profile::Gaussian;
    if (name == "gevrey") return Profile::Gevrey;
    throw DomainError("unknown initial-data profile '" + name + "' (expected gaussian or gevrey)");
}

std::string InitialData::profile_name(Profile p) { return p == Profile::Gaussian ? "gaussian" : "gevrey"; }

}  // namespace landau
