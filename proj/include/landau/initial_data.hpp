#pragma once

#include "landau/spectral.hpp"
#include "landau/types.hpp"

#include <string>
#include <vector>

namespace landau {

// One travelling wave amplitude * cos(k x + eta_offset v) times the v-profile.
struct ModeSpec {
    int k = 1;
    double eta_offset = 0.0;
    double amplitude = 0.0;
};

// Perturbation f0 with Fourier coefficients f0_hat(k, eta) = int int e^{-ikx - i eta v} f0 dx dv / 2pi.
//   gaussian profile: amplitude/2 * exp(-(eta - eta_offset)^2 / 2)  (i.e. times M(v) in v)
//   gevrey profile:   amplitude/2 * exp(-lambda_g <k, eta - eta_offset>^gamma_g), synthesized in eta
struct InitialData {
    enum class Profile { Gaussian, Gevrey };

    std::vector<ModeSpec> modes;
    Profile profile = Profile::Gaussian;
    double gevrey_lambda = 1.0;
    double gevrey_gamma = 0.6;

    static InitialData single(int k, double amplitude, double eta_offset = 0.0);

    cplx f_hat(int k, double eta) const;
    // free-transport density f0_hat(k, k t)
    cplx source(int k, double t) const { return f_hat(k, k * t); }
    int max_k() const;
    double max_eta_offset() const;

    // g_k(v_j) at t = 0; gaussian profile in closed form, gevrey through the inverse eta transform
    SpectralState to_state(const Grid& g) const;

    static Profile parse_profile(const std::string& name);
    static std::string profile_name(Profile p);
};

}  // namespace landau
