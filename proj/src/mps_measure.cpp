#include <algorithm>
#include <stdexcept>

#include "bhcav/dmrg.hpp"

namespace bhcav::mps {

ObservableSet measure_mps(const MpsState& psi, const LatticeSpec& spec_in) {
  const LatticeSpec spec = resolved(spec_in);
  const int M = psi.sites;
  if (M != spec.sites || psi.particles != spec.particles || psi.n_max != spec.n_max) {
    throw std::invalid_argument("MPS does not match the lattice spec");
  }
  const int d = psi.phys_dim();
  const LocalOp id = identity_op(d);
  const LocalOp num = number_op(d);
  const LocalOp num2 = number_squared_op(d);
  const LocalOp up = create_op(d);
  const LocalOp down = annihilate_op(d);
  const LocalOp top = projector_op(d, psi.n_max);
  const LocalOp next = projector_op(d, psi.n_max - 1);

  auto transfer = [&](const BondOperator& env, int i, const LocalOp& op) {
    return left_transfer(env, psi.tensors[i], psi.bonds[i], psi.bonds[i + 1], op);
  };

  std::vector<BondOperator> left(M + 1), right(M + 1);
  left[0] = identity_operator(psi.bonds[0]);
  for (int i = 0; i < M; ++i) left[i + 1] = transfer(left[i], i, id);
  right[M] = identity_operator(psi.bonds[M]);
  for (int i = M - 1; i >= 0; --i) {
    right[i] = right_transfer(right[i + 1], psi.tensors[i], psi.bonds[i], psi.bonds[i + 1], id);
  }
  const double norm = contract(left[M], right[M]);
  if (!(norm > 0.0)) throw std::runtime_error("MPS has zero norm");

  ObservableSet obs;
  obs.densities = Eigen::VectorXd::Zero(M);
  obs.density_corr = Eigen::MatrixXd::Zero(M, M);
  double hop = 0.0;
  double cutoff = 0.0;
  double below = 0.0;
  for (int i = 0; i < M; ++i) {
    obs.densities(i) = contract(transfer(left[i], i, num), right[i + 1]) / norm;
    obs.density_corr(i, i) = contract(transfer(left[i], i, num2), right[i + 1]) / norm;
    if (psi.n_max < psi.particles) {
      cutoff = std::max(cutoff, contract(transfer(left[i], i, top), right[i + 1]) / norm);
      below = std::max(below, contract(transfer(left[i], i, next), right[i + 1]) / norm);
    }
    BondOperator env = transfer(left[i], i, num);
    for (int j = i + 1; j < M; ++j) {
      const double v = contract(transfer(env, j, num), right[j + 1]) / norm;
      obs.density_corr(i, j) = v;
      obs.density_corr(j, i) = v;
      if (j + 1 < M) env = transfer(env, j, id);
    }
    if (i + 1 < M) {
      const BondOperator e1 = transfer(left[i], i, up);
      hop += contract(transfer(e1, i + 1, down), right[i + 2]) / norm;
    }
  }
  obs.B_mean = 2.0 * hop;
  obs.P_mean = obs.density_corr.trace();
  obs.N_mean = obs.densities.sum();
  obs.cutoff_weight = cutoff;
  obs.below_cutoff_weight = below;
  obs.energy = energy_from_parts(spec, obs);
  return obs;
}

}  // namespace bhcav::mps
