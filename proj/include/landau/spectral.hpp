#pragma once

#include "landau/types.hpp"

#include <cstddef>
#include <vector>

namespace landau {

// Modes k in [-k_max, k_max], v_j = -V + j dv on [-V, V), eta_m = (m - N/2) deta.
struct Grid {
    int k_max = 1;
    double V = 8.0;
    int n_v = 256;

    double dv() const { return 2.0 * V / n_v; }
    double v(int j) const { return -V + j * dv(); }
    double deta() const { return pi / V; }
    double eta(int m) const { return (m - n_v / 2) * deta(); }
    double eta_max() const { return pi / dv(); }
    int n_modes() const { return 2 * k_max + 1; }

    void validate() const;  // throws DomainError

    bool operator==(const Grid&) const = default;
};

// Smallest even N_v resolving phases e^{-i a v} on [-V, V) (|a| dv < pi).
int required_nv(double V, double a);

class SpectralState {
public:
    SpectralState() = default;
    explicit SpectralState(const Grid& g, double t = 0.0);

    const Grid& grid() const { return grid_; }
    double t() const { return t_; }
    void set_t(double t) { t_ = t; }

    cplx* mode(int k) { return data_.data() + index(k); }
    const cplx* mode(int k) const { return data_.data() + index(k); }
    cplx& at(int k, int j) { return data_[index(k) + j]; }
    cplx at(int k, int j) const { return data_[index(k) + j]; }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    double peak() const;
    // max |g_{-k} - conj g_k| relative to the peak
    double reality_defect() const;
    // overwrite negative modes with conjugates of positive ones, make g_0 real;
    // returns the defect removed
    double symmetrize();
    bool finite() const;

private:
    std::size_t index(int k) const;

    Grid grid_;
    double t_ = 0.0;
    std::vector<cplx> data_;
};

namespace spectral {

inline constexpr double boundary_tol = 1e-12;

// Largest |g_k| at the two edge nodes, over all modes.
double spectral_floor(const SpectralState& s);

// Throws BoundaryDecayError when |g_k| at |v| = V exceeds boundary_tol times
// the largest value in the state.
void check_boundary(const SpectralState& s, int k);

// Raw transforms on a single row of n_v samples.
CVector to_eta(const Grid& g, const cplx* row);
CVector from_eta(const Grid& g, const cplx* eta_row);
// d/dv by multiplication with i eta, Nyquist bin zeroed
void v_derivative(const Grid& g, const cplx* row, cplx* out);
cplx moment(const Grid& g, const cplx* row, double a);

CVector to_eta(const SpectralState& s, int k);
CVector eta_derivative(const SpectralState& s, int k);
// int g_k(v) e^{-i a v} dv; throws ResolutionError if |a| dv >= pi
cplx oscillatory_moment(const SpectralState& s, int k, double a);

}  // namespace spectral
}  // namespace landau
