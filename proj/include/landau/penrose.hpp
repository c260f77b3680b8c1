#pragma once

#include "landau/equilibria.hpp"
#include "landau/types.hpp"

#include <optional>
#include <vector>

namespace landau::penrose {

// L(k, lambda) = int_0^inf e^{-lambda t} t mu_hat(k t) dt, for Re lambda > -theta0 |k|.
cplx laplace_symbol(const Equilibrium& eq, int k, cplx lambda);
// D(k, lambda) = 1 + L(k, lambda)
cplx dispersion(const Equilibrium& eq, int k, cplx lambda);

// Truncation point of the quadrature: the envelope tail
// C0 e^{-r T} (T/r + 1/r^2), r = Re lambda + theta0 |k|, is below `tol`.
double truncation_time(const Equilibrium& eq, int k, cplx lambda, double tol = 1e-15);

// Constants of the symbol bounds on Re lambda >= -theta |k|:
//   |L| <= A / k^2,   |L| <= (mu_hat(0) + B) / |Im lambda|^2,
//   A = int s e^{theta s} |mu_hat(s)| ds,
//   B = int e^{theta s} (2 |mu_hat'(s)| + s |mu_hat''(s)|) ds,
// hence |L| <= C1 / (1 + k^2 + (Im lambda)^2) with C1 = 3 max(A, mu_hat(0) + B).
struct SymbolBounds {
    double theta = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C1 = 0.0;
    int k_tail = 1;         // |L| <= 1/2 for every |k| >= k_tail
    double im_bound = 0.0;  // |L| <= 1/2 for every |Im lambda| >= im_bound
};
SymbolBounds symbol_bounds(const Equilibrium& eq, double theta);

struct Rect {
    double re_lo = 0.0;
    double re_hi = 1.0;
    double im_lo = -1.0;
    double im_hi = 1.0;
};

struct Winding {
    int k = 1;
    Rect rect;
    int count = 0;
    double raw = 0.0;      // total argument change / 2 pi before rounding
    double min_abs_d = 0.0;  // smallest |D| met on the contour
    int evaluations = 0;
};

// Number of zeros of D(k, .) inside `rect` by the argument principle.
// Throws DomainError if |D| < 1e-8 on the contour (move the rectangle).
Winding winding(const Equilibrium& eq, int k, const Rect& rect);
inline int count_zeros(const Equilibrium& eq, int k, const Rect& rect) { return winding(eq, k, rect).count; }

struct Root {
    int k = 1;
    cplx lambda;
    double residual = 0.0;
    int iterations = 0;
};

// Newton iteration on D(k, .); ConvergenceError if |D| does not drop below
// 1e-10 within 50 iterations or the iterate comes within 2% of the boundary
// Re lambda = -theta0 |k| (DomainError for a seed beyond it).
Root find_root(const Equilibrium& eq, int k, cplx seed);
// Grid point of smallest |D| inside `rect` (n x n samples).
cplx coarse_seed(const Equilibrium& eq, int k, const Rect& rect, int n = 41);

struct MarginResult {
    double kappa0 = 0.0;
    int k_min = 1;          // where the scan minimum sits
    double omega_min = 0.0;
    double scan_min = 0.0;
    double tail_k = 1.0;    // lower bound of |D| for k > k_max_scan
    double tail_omega = 1.0;  // lower bound of |D| for |omega| > omega_max
    double C1 = 0.0;
    std::vector<Winding> windings;
    std::optional<Root> unstable;  // a located zero in Re lambda > 0, when Newton finds one
};

MarginResult margin(const Equilibrium& eq, int k_max_scan, double omega_max, int n_omega);

struct StripResult {
    double theta1 = 0.0;
    int k_tail = 1;
    double C1 = 0.0;
    int bisection_steps = 0;
    std::vector<Winding> windings;  // certificates at the accepted theta1
};

// Largest theta <= theta0/2 (bisection tolerance 1e-3) such that D(k, .) has no
// zero in Re lambda in [-theta |k|, 0] for every k. Throws StabilityError if
// the margin vanishes.
StripResult strip_width(const Equilibrium& eq, int k_max_scan);

struct DispersionReport {
    MarginResult margin;
    std::optional<StripResult> strip;
    std::vector<Root> roots;
};

}  // namespace landau::penrose
