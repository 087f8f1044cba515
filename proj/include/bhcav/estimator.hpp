#pragma once

// Two-cavity energy readout. Cavity 1 (mode sin(pi x/d), pumped) has a
// steady-state quadrature linear in N and B; cavity 2 (mode cos(pi x/d),
// driven through the atoms) emits photons in proportion to the staggered
// density correlations. Together they give an estimator G whose mean tracks
// <H> in the Mott regime.

#include <complex>
#include <string>

#include "bhcav/lattice_optics.hpp"
#include "bhcav/model.hpp"

namespace bhcav {

// Frequencies in units of the cavity decay rate unless stated otherwise.
struct CavityParams {
  double kappa = 1.0;
  // cavity 1
  double eta1 = 1.0;
  double detuning_c1 = 5.0;
  double g1 = 1.0;
  double detuning_a1 = 20.0;
  // cavity 2
  double omega0 = 1.0;
  double detuning_c2 = 5.0;
  double g2 = 1.0;
  double detuning_a2 = 20.0;
  // Cavity 2 is not pumped externally; only 0 is accepted.
  double eta2 = 0.0;
};

// kappa > 0, eta2 == 0, nonzero atomic detunings, all finite.
void validate(const CavityParams& cav);
// g1^2/|detuning_a1| <= 0.1 min(kappa, |detuning_c1|).
bool within_linear_regime(const CavityParams& cav);

// Number of site pairs i < j with i + j even.
long long same_parity_pairs(int sites);

// E0 runs to 1e4-1e5 U while G is of order U, so the coefficients and
// readouts are carried in extended precision.
using Real = long double;

struct EstimatorCoefficients {
  Real chi0 = 0.0;
  Real chi1 = 0.0;
  Real chi2 = 0.0;
  std::complex<Real> R{};
  Real xi = 0.0;
  Real alpha = 0.0;
  Real E0 = 0.0;  // NaN when unusable
  double n_est = 0.0;
  bool validity_warning = false;
  // chi2 != 0 and xi > 0; otherwise `problem` says why.
  bool usable = false;
  std::string problem;
};

// Closed-form coefficients. alpha and E0 use the particle-number estimate
// n_est; the readouts themselves always see the true N.
EstimatorCoefficients coefficients(const CavityParams& cav, const optics::OverlapTable& ov,
                                   const LatticeSpec& spec, double n_est);

// Throws std::invalid_argument with coef.problem when !coef.usable.
void require_usable(const EstimatorCoefficients& coef);

// <a1 + a1^+> = chi0 + chi1 N + chi2 <B>.
Real quad1_readout(const EstimatorCoefficients& coef, const ObservableSet& obs);

struct PhotonReadout {
  Real exact = 0.0;   // |R|^2 J20^2 sum_ij (-1)^(i+j) <n_i n_j>
  Real approx = 0.0;  // xi P + alpha
};
// Throws std::invalid_argument if the correlation table is missing.
PhotonReadout photon2_readout(const EstimatorCoefficients& coef, const ObservableSet& obs);

// G = -(J/chi2) quad1 + (U/(2 xi)) photon2 - E0.
double estimate_energy(const EstimatorCoefficients& coef, Real quad1, Real photon2,
                       const LatticeSpec& spec);

struct EstimatorOptions {
  // Relative error on the particle-number estimate used for the band. The
  // error is applied to every place n_est enters (chi1 subtraction, alpha,
  // E0).
  double n_error = 0.10;
  // Estimate taken as exact N when <= 0.
  double n_est = 0.0;
  // Feed photon2 from the full correlation table (the physical readout) or
  // from the factorized xi P + alpha form.
  bool exact_photons = true;
};

struct EstimatorReport {
  EstimatorCoefficients coef;
  Real quad1 = 0.0;
  Real photon2_exact = 0.0;
  Real photon2_approx = 0.0;
  double G_estimate = 0.0;
  double E_exact = 0.0;
  double discrepancy = 0.0;  // |G - E| / N
  double band_low = 0.0;
  double band_high = 0.0;
  double n_error = 0.0;
  int particles = 0;

  double G_per_particle() const { return G_estimate / particles; }
  double E_per_particle() const { return E_exact / particles; }
  double band_low_per_particle() const { return band_low / particles; }
  double band_high_per_particle() const { return band_high / particles; }
};

EstimatorReport run_estimator(const CavityParams& cav, const optics::OverlapTable& ov,
                              const LatticeSpec& spec, const ObservableSet& obs,
                              const EstimatorOptions& opt = {});

// Overlap table of the default lattice (10 E_r, 16 plane waves, 2048 points).
const optics::OverlapTable& default_overlaps();

}  // namespace bhcav
