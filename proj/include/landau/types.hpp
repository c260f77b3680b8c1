#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace landau {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Japanese bracket <k, eta> = sqrt(1 + k^2 + eta^2).
inline double bracket(double k, double eta) { return std::sqrt(1.0 + k * k + eta * eta); }

}  // namespace landau
