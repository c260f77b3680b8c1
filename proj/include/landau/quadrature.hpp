#pragma once

#include "landau/types.hpp"

#include <functional>
#include <vector>

namespace landau::quad {

using ComplexIntegrand = std::function<cplx(double)>;
using RealIntegrand = std::function<double(double)>;

struct AdaptiveOptions {
    double abs_tol = 1e-15;      ///< target absolute error over the whole interval
    double rel_tol = 1e-14;      ///< relative floor, applied per panel
    double initial_width = 1.0;  ///< width of the panels seeded before refinement
    int max_depth = 30;
};

struct Result {
    cplx value;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand on [a, b].
///
/// The interval is first cut into panels no wider than `initial_width`; each
/// panel is bisected until the Kronrod/Gauss difference falls below its share
/// of the tolerance. Panels are visited in a fixed order, so the result is
/// reproducible bit for bit.
Result integrate(const ComplexIntegrand& f, double a, double b, const AdaptiveOptions& opts = {});

double integrate_real(const RealIntegrand& f, double a, double b, const AdaptiveOptions& opts = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Rule gauss_legendre(int n);

}  // namespace landau::quad
