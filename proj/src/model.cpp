#include "bhcav/model.hpp"

#include <stdexcept>
#include <string>

namespace bhcav {

int default_cutoff(int sites, int particles) {
  return (particles + sites - 1) / sites + 3;
}

void validate(const LatticeSpec& spec) {
  if (spec.sites < 2) throw std::invalid_argument("need at least two sites");
  if (spec.particles < 1) throw std::invalid_argument("need at least one particle");
  if (!(spec.tunneling >= 0.0)) throw std::invalid_argument("tunneling J must be >= 0");
  if (!(spec.interaction > 0.0)) throw std::invalid_argument("interaction U must be > 0");
  const int min_cutoff = (spec.particles + spec.sites - 1) / spec.sites + 2;
  if (spec.n_max < min_cutoff) {
    throw std::invalid_argument("occupation cutoff n_max=" + std::to_string(spec.n_max) +
                                " is below ceil(N/M)+2=" + std::to_string(min_cutoff));
  }
}

LatticeSpec resolved(LatticeSpec spec) {
  if (spec.n_max == 0 && spec.sites > 0) {
    spec.n_max = default_cutoff(spec.sites, spec.particles);
  }
  validate(spec);
  return spec;
}

void check_consistent(const LatticeSpec& spec, const ObservableSet& obs) {
  if (obs.density_corr.rows() != spec.sites || obs.density_corr.cols() != spec.sites) {
    throw std::invalid_argument("observable set has " + std::to_string(obs.density_corr.rows()) +
                                " sites, lattice has " + std::to_string(spec.sites));
  }
}

double energy_from_parts(const LatticeSpec& spec, const ObservableSet& obs) {
  check_consistent(spec, obs);
  const double U = spec.interaction;
  return -spec.tunneling * obs.B_mean + 0.5 * U * obs.P_mean - 0.5 * U * spec.particles;
}

double quench_work(const LatticeSpec& spec, const ObservableSet& obs, double dJ) {
  check_consistent(spec, obs);
  return -dJ * obs.B_mean;
}

}  // namespace bhcav
