#pragma once

#include "landau/linear.hpp"
#include "landau/spectral.hpp"
#include "landau/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace landau::norms {

struct WeightParams {
    double gamma = 1.0;
    double sigma = 3.2;
    double delta = 0.1;
    double lambda0 = 0.05;
    double lambda1 = 0.2;

    // every violated constraint, phrased as the inequality that fails
    std::vector<std::string> violations() const;
    void validate() const;  // throws DomainError listing all violations
};

// A_{k,eta} = e^{z <k,eta>^gamma} <k,eta>^sigma
double weight(double k, double eta, double z, const WeightParams& p);
// lambda(t) = lambda0 (1 + (1+t)^{-delta}) and its time derivative
double radius(double t, const WeightParams& p);
double radius_rate(double t, const WeightParams& p);
// 33 points on [0, lambda1]
std::vector<double> default_z_grid(const WeightParams& p, int n = 33);

// |g_{k,eta}|^2 and |d_eta g_{k,eta}|^2 on the eta-grid for every mode.
// Entries at or below the transform's rounding floor (1e3 eps times the
// largest l1 row norm) are set to zero so the exponential weights do not
// amplify noise; the largest discarded magnitude is kept in `floor`.
struct EtaSpectrum {
    Grid grid;
    double t = 0.0;
    std::vector<double> g2;  // [(k + k_max) * n_v + m]
    std::vector<double> d2;
    double floor = 0.0;
};

EtaSpectrum spectrum(const SpectralState& s);

double gen_G(const EtaSpectrum& sp, double z, const WeightParams& p);
double gen_G(const SpectralState& s, double z, const WeightParams& p);
// rho indexed by k = 0..k_max (entry 0 ignored); negative modes by symmetry
double gen_F(const std::vector<cplx>& rho, double t, double z, const WeightParams& p);

// share of G coming from |eta| >= frac * eta_max; the continuous integral's
// mass beyond the grid is not extrapolated, this only indicates whether it matters
double gen_G_edge_fraction(const EtaSpectrum& sp, double z, const WeightParams& p, double frac = 0.9);

// G with the Fourier multiplier |k|^{gamma/2} (x-version) or |eta|^{gamma/2}
// (v-version) applied to both g and d_eta g
double gen_G_multiplied(const EtaSpectrum& sp, double z, const WeightParams& p, bool velocity);

struct SqrtGMargin {
    double margin = 0.0;  // G^{1/2} - F
    double F = 0.0;
    double sqrtG = 0.0;
    double tolerance = 0.0;  // discretization floor used for flagging
    bool flagged = false;
};
SqrtGMargin check_F_le_sqrtG(const EtaSpectrum& sp, const std::vector<cplx>& rho, double z, const WeightParams& p);

struct MultiplierMargin {
    double dGdz = 0.0;
    double x_margin = 0.0;  // dG/dz - G[|d_x|^{gamma/2} g]
    double v_margin = 0.0;  // dG/dz - G[|d_v|^{gamma/2} g]
};
MultiplierMargin check_multiplier(const EtaSpectrum& sp, double z, const WeightParams& p, double dz);

struct NormProfile {
    std::vector<double> t;
    std::vector<double> z;
    std::vector<double> lambda;           // radius at each t
    std::vector<std::vector<double>> G;   // [t][z]
    std::vector<std::vector<double>> F;   // [t][z]
    std::vector<double> F_at_lambda;      // F(t, lambda(t))
    std::vector<double> G_at_lambda;
    std::vector<double> sqrtG_margin_min;  // min over z in {0, lambda/2, lambda}
    std::vector<double> multiplier_min;    // min of both multiplier margins at z = lambda(t)/2
    std::vector<double> floor;
    std::vector<double> edge_fraction;  // at z = lambda(t)
};

// Builds a profile snapshot by snapshot (usable as a run observer).
class ProfileBuilder {
public:
    ProfileBuilder(const WeightParams& p, std::vector<double> z_grid);
    void add(const SpectralState& s, const std::vector<cplx>& rho);
    const NormProfile& profile() const { return prof_; }

private:
    WeightParams p_;
    NormProfile prof_;
};

struct Fg1Result {
    double C0 = 0.0;
    double t_tight = 0.0;
    double z_tight = 0.0;
    int points = 0;
    int skipped = 0;  // d_t G at or below its noise floor
};

// Smallest C0 with d_t G <= C0 F G^{1/2} + C0 (1+t) F d_z G at every interior
// (t, z) of the profile; centered differences in t and z.
Fg1Result check_FG1(const NormProfile& prof, const WeightParams& p);
// largest value of d_t G - C0 (F G^{1/2} + (1+t) F d_z G) over the same points
double FG1_violation(const NormProfile& prof, double C0);

struct ContractionResult {
    std::vector<bool> holds;
    std::optional<double> first_failure;
    double worst = 0.0;  // max of lambda' + C0 (1+t) F
};
ContractionResult check_contraction(const std::vector<double>& t, const std::vector<double>& F_at_lambda,
                                    const WeightParams& p, double C0);

struct DecayCheck {
    bool holds = true;
    double worst_ratio = 0.0;  // max F / (sqrt(eps) <t>^{1-sigma})
    double worst_t = 0.0;
    std::optional<double> first_passage;  // first t after which the bound holds for good
};
// F(t, lambda(t)) <= sqrt(eps) <t>^{1-sigma} for t > t.front()
DecayCheck check_decay(const std::vector<double>& t, const std::vector<double>& F_at_lambda, double eps,
                       const WeightParams& p);

struct PropagatorFit {
    double C = 0.0;
    double worst_t = 0.0;
};
// F_rho(t) <= F_S(t) + C int_0^t e^{-theta1 (t-s)/4} F_S(s) ds along linear traces;
// rho[k-1] and S[k-1] hold mode k on a common grid of spacing dt.
PropagatorFit propagator_fit(const std::vector<std::vector<cplx>>& rho, const std::vector<std::vector<cplx>>& S,
                             double dt, double z, double theta1, const WeightParams& p);

}  // namespace landau::norms
