#include "bhcav/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bhcav {

void validate(const CavityParams& cav) {
  const double all[] = {cav.kappa,  cav.eta1,        cav.detuning_c1, cav.g1,          cav.detuning_a1,
                        cav.omega0, cav.detuning_c2, cav.g2,          cav.detuning_a2, cav.eta2};
  for (double v : all) {
    if (!std::isfinite(v)) throw std::invalid_argument("cavity parameters must be finite");
  }
  if (!(cav.kappa > 0.0)) throw std::invalid_argument("cavity decay kappa must be > 0");
  if (cav.eta2 != 0.0) throw std::invalid_argument("cavity 2 must not be pumped (eta2 = 0)");
  if (cav.detuning_a1 == 0.0 || cav.detuning_a2 == 0.0) {
    throw std::invalid_argument("atomic detunings must be nonzero");
  }
}

bool within_linear_regime(const CavityParams& cav) {
  const double shift = cav.g1 * cav.g1 / std::abs(cav.detuning_a1);
  return shift <= 0.1 * std::min(cav.kappa, std::abs(cav.detuning_c1));
}

long long same_parity_pairs(int sites) {
  const long long even = (sites + 1) / 2;
  const long long odd = sites / 2;
  return even * (even - 1) / 2 + odd * (odd - 1) / 2;
}

EstimatorCoefficients coefficients(const CavityParams& cav, const optics::OverlapTable& ov,
                                   const LatticeSpec& spec, double n_est) {
  validate(cav);
  if (!(n_est > 0.0)) throw std::invalid_argument("particle-number estimate must be > 0");
  EstimatorCoefficients c;
  c.n_est = n_est;
  c.validity_warning = !within_linear_regime(cav);

  const Real kappa = cav.kappa, eta1 = cav.eta1, dc1 = cav.detuning_c1, g1 = cav.g1;
  const Real lorentz = kappa * kappa + dc1 * dc1;
  const Real dispersive = -2 * eta1 * g1 * g1 / Real(cav.detuning_a1) / lorentz;
  c.chi0 = 2 * eta1 * dc1 / lorentz;
  c.chi1 = dispersive * ov.J11_onsite;
  c.chi2 = dispersive * ov.J11_hop;

  c.R = Real(cav.omega0) * Real(cav.g2) /
        (Real(cav.detuning_a2) * std::complex<Real>(cav.detuning_c2, cav.kappa));
  const Real scale = std::norm(c.R) * Real(ov.J20) * Real(ov.J20);
  c.xi = 2 * scale;
  const Real ne = n_est;
  const Real n = ne / spec.sites;
  c.alpha = scale * (-ne * ne + 4 * n * n * static_cast<Real>(same_parity_pairs(spec.sites)));

  if (c.chi2 == 0.0) {
    c.problem = "chi2 = 0: cavity 1 does not see the tunneling operator";
  } else if (!(c.xi > 0.0)) {
    c.problem = "xi = 0: cavity 2 emits no signal";
  }
  c.usable = c.problem.empty();
  if (c.usable) {
    const Real J = spec.tunneling;
    const Real U = spec.interaction;
    const Real ne = n_est;
    c.E0 = U * ne / 2 - J * (c.chi0 + c.chi1 * ne) / c.chi2 + c.alpha * U / (2 * c.xi);
  } else {
    c.E0 = std::numeric_limits<Real>::quiet_NaN();
  }
  return c;
}

void require_usable(const EstimatorCoefficients& coef) {
  if (!coef.usable) throw std::invalid_argument("estimator refused: " + coef.problem);
}

Real quad1_readout(const EstimatorCoefficients& coef, const ObservableSet& obs) {
  return coef.chi0 + coef.chi1 * Real(obs.N_mean) + coef.chi2 * Real(obs.B_mean);
}

PhotonReadout photon2_readout(const EstimatorCoefficients& coef, const ObservableSet& obs) {
  const auto M = obs.density_corr.rows();
  if (M == 0 || obs.density_corr.cols() != M) {
    throw std::invalid_argument("photon readout needs the full density correlation table");
  }
  Real staggered = 0;
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      staggered += ((i + j) % 2 == 0 ? 1 : -1) * Real(obs.density_corr(i, j));
    }
  }
  PhotonReadout out;
  out.exact = coef.xi / 2 * staggered;
  out.approx = coef.xi * Real(obs.P_mean) + coef.alpha;
  return out;
}

double estimate_energy(const EstimatorCoefficients& coef, Real quad1, Real photon2,
                       const LatticeSpec& spec) {
  require_usable(coef);
  const Real J = spec.tunneling;
  const Real U = spec.interaction;
  return static_cast<double>(-(J / coef.chi2) * quad1 + (U / (2 * coef.xi)) * photon2 - coef.E0);
}

EstimatorReport run_estimator(const CavityParams& cav, const optics::OverlapTable& ov,
                              const LatticeSpec& spec, const ObservableSet& obs,
                              const EstimatorOptions& opt) {
  check_consistent(spec, obs);
  if (!(opt.n_error >= 0.0 && opt.n_error < 1.0)) {
    throw std::invalid_argument("n_error must lie in [0, 1)");
  }
  const double n_est = opt.n_est > 0.0 ? opt.n_est : static_cast<double>(spec.particles);

  EstimatorReport rep;
  rep.particles = spec.particles;
  rep.n_error = opt.n_error;
  rep.coef = coefficients(cav, ov, spec, n_est);
  require_usable(rep.coef);
  rep.quad1 = quad1_readout(rep.coef, obs);
  const PhotonReadout ph = photon2_readout(rep.coef, obs);
  rep.photon2_exact = ph.exact;
  rep.photon2_approx = ph.approx;
  rep.G_estimate = estimate_energy(rep.coef, rep.quad1,
                                   opt.exact_photons ? ph.exact : ph.approx, spec);
  rep.E_exact = obs.energy;
  rep.discrepancy = std::abs(rep.G_estimate - rep.E_exact) / spec.particles;

  rep.band_low = rep.band_high = rep.G_estimate;
  if (opt.n_error > 0.0) {
    for (double sign : {-1.0, 1.0}) {
      const EstimatorCoefficients c = coefficients(cav, ov, spec, n_est * (1.0 + sign * opt.n_error));
      // The readouts are physical and do not depend on the estimate, except
      // that the factorized photon form carries alpha(n_est).
      const Real photons = opt.exact_photons ? ph.exact : photon2_readout(c, obs).approx;
      const double g = estimate_energy(c, rep.quad1, photons, spec);
      rep.band_low = std::min(rep.band_low, g);
      rep.band_high = std::max(rep.band_high, g);
    }
  }
  return rep;
}

const optics::OverlapTable& default_overlaps() {
  static const optics::OverlapTable table = optics::compute_overlaps(optics::LatticePotential{});
  return table;
}

}  // namespace bhcav
