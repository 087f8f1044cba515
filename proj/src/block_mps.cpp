#include "bhcav/block_mps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bhcav::mps {

int BondSpace::find(int charge) const {
  const auto it = std::lower_bound(charges.begin(), charges.end(), charge);
  if (it == charges.end() || *it != charge) return -1;
  return static_cast<int>(it - charges.begin());
}

Eigen::Index BondSpace::total_dim() const {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{0});
}

LocalOp identity_op(int d) { return {0, std::vector<double>(d, 1.0)}; }

LocalOp number_op(int d) {
  LocalOp op{0, std::vector<double>(d)};
  for (int s = 0; s < d; ++s) op.amp[s] = s;
  return op;
}

LocalOp number_squared_op(int d) {
  LocalOp op{0, std::vector<double>(d)};
  for (int s = 0; s < d; ++s) op.amp[s] = static_cast<double>(s) * s;
  return op;
}

LocalOp interaction_op(int d, double U) {
  LocalOp op{0, std::vector<double>(d)};
  for (int s = 0; s < d; ++s) op.amp[s] = 0.5 * U * s * (s - 1);
  return op;
}

LocalOp create_op(int d) {
  LocalOp op{+1, std::vector<double>(d, 0.0)};
  for (int s = 0; s + 1 < d; ++s) op.amp[s] = std::sqrt(s + 1.0);
  return op;
}

LocalOp annihilate_op(int d) {
  LocalOp op{-1, std::vector<double>(d, 0.0)};
  for (int s = 1; s < d; ++s) op.amp[s] = std::sqrt(static_cast<double>(s));
  return op;
}

LocalOp projector_op(int d, int level) {
  LocalOp op{0, std::vector<double>(d, 0.0)};
  if (level >= 0 && level < d) op.amp[level] = 1.0;
  return op;
}

std::vector<Eigen::Index> MpsState::bond_dimensions() const {
  std::vector<Eigen::Index> out;
  out.reserve(bonds.size());
  for (const auto& b : bonds) out.push_back(b.total_dim());
  return out;
}

Eigen::Index MpsState::max_bond_dimension() const {
  Eigen::Index m = 0;
  for (const auto& b : bonds) m = std::max(m, b.total_dim());
  return m;
}

MpsState product_state(const std::vector<int>& occupations, int n_max) {
  const int M = static_cast<int>(occupations.size());
  if (M < 1) throw std::invalid_argument("empty product state");
  MpsState psi;
  psi.sites = M;
  psi.n_max = n_max;
  const int d = n_max + 1;
  int charge = 0;
  psi.bonds.push_back({{0}, {1}});
  for (int i = 0; i < M; ++i) {
    const int s = occupations[i];
    if (s < 0 || s > n_max) throw std::invalid_argument("occupation outside the cutoff");
    SiteTensor t;
    t.phys_dim = d;
    t.blocks.assign(d, Eigen::MatrixXd());
    t.block(0, s) = Eigen::MatrixXd::Ones(1, 1);
    psi.tensors.push_back(std::move(t));
    charge += s;
    psi.bonds.push_back({{charge}, {1}});
  }
  psi.particles = charge;
  psi.center = 0;
  return psi;
}

MpsState uniform_product_state(int sites, int particles, int n_max) {
  std::vector<int> occ(sites);
  for (int i = 0; i < sites; ++i) {
    const long long a = static_cast<long long>(i + 1) * particles / sites;
    const long long b = static_cast<long long>(i) * particles / sites;
    occ[i] = static_cast<int>(a - b);
  }
  return product_state(occ, n_max);
}

MpsState with_cutoff(const MpsState& psi, int n_max) {
  if (n_max < psi.n_max) throw std::invalid_argument("cutoff can only be raised");
  MpsState out = psi;
  out.n_max = n_max;
  const int d_old = psi.phys_dim();
  const int d = n_max + 1;
  for (int i = 0; i < psi.sites; ++i) {
    SiteTensor t;
    t.phys_dim = d;
    const int nl = psi.bonds[i].sectors();
    t.blocks.assign(static_cast<std::size_t>(nl) * d, Eigen::MatrixXd());
    for (int l = 0; l < nl; ++l) {
      for (int s = 0; s < d_old; ++s) t.block(l, s) = psi.tensors[i].block(l, s);
    }
    out.tensors[i] = std::move(t);
  }
  return out;
}

bool BondOperator::empty() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.size() == 0; });
}

BondOperator identity_operator(const BondSpace& bond) {
  BondOperator op;
  op.shift = 0;
  for (auto dim : bond.dims) op.blocks.push_back(Eigen::MatrixXd::Identity(dim, dim));
  return op;
}

BondOperator zero_operator(const BondSpace& bond, int shift) {
  BondOperator op;
  op.shift = shift;
  op.blocks.assign(bond.sectors(), Eigen::MatrixXd());
  return op;
}

namespace {

void add_block(Eigen::MatrixXd& target, const Eigen::MatrixXd& value) {
  if (target.size() == 0) {
    target = value;
  } else {
    target += value;
  }
}

}  // namespace

BondOperator left_transfer(const BondOperator& env, const SiteTensor& A, const BondSpace& left,
                           const BondSpace& right, const LocalOp& op) {
  BondOperator out = zero_operator(right, env.shift + op.delta);
  const int d = A.phys_dim;
  Eigen::MatrixXd tmp;
  for (int l = 0; l < left.sectors(); ++l) {
    const auto& E = env.blocks[l];
    if (E.size() == 0) continue;
    const int q = left.charges[l];
    const int lb = left.find(q + env.shift);
    if (lb < 0) continue;
    for (int s = 0; s < d; ++s) {
      const int sb = s + op.delta;
      if (sb < 0 || sb >= d || op.amp[s] == 0.0) continue;
      const auto& ket = A.block(l, s);
      const auto& bra = A.block(lb, sb);
      if (ket.size() == 0 || bra.size() == 0) continue;
      const int r = right.find(q + s);
      tmp.noalias() = E * ket;
      add_block(out.blocks[r], op.amp[s] * (bra.transpose() * tmp));
    }
  }
  return out;
}

BondOperator right_transfer(const BondOperator& env, const SiteTensor& B, const BondSpace& left,
                            const BondSpace& right, const LocalOp& op) {
  BondOperator out = zero_operator(left, env.shift - op.delta);
  const int d = B.phys_dim;
  Eigen::MatrixXd tmp;
  for (int l = 0; l < left.sectors(); ++l) {
    const int q = left.charges[l];
    const int lb = left.find(q + out.shift);
    if (lb < 0) continue;
    for (int s = 0; s < d; ++s) {
      const int sb = s + op.delta;
      if (sb < 0 || sb >= d || op.amp[s] == 0.0) continue;
      const auto& ket = B.block(l, s);
      const auto& bra = B.block(lb, sb);
      if (ket.size() == 0 || bra.size() == 0) continue;
      const int r = right.find(q + s);
      const auto& E = env.blocks[r];
      if (E.size() == 0) continue;
      tmp.noalias() = E * ket.transpose();
      add_block(out.blocks[l], op.amp[s] * (bra * tmp));
    }
  }
  return out;
}

void accumulate(BondOperator& into, const BondOperator& term, double factor) {
  if (into.shift != term.shift || into.blocks.size() != term.blocks.size()) {
    throw std::invalid_argument("bond operators do not match");
  }
  for (std::size_t k = 0; k < term.blocks.size(); ++k) {
    if (term.blocks[k].size() == 0) continue;
    add_block(into.blocks[k], factor * term.blocks[k]);
  }
}

double contract(const BondOperator& left, const BondOperator& right) {
  if (left.shift != right.shift || left.blocks.size() != right.blocks.size()) {
    throw std::invalid_argument("bond operators do not match");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < left.blocks.size(); ++k) {
    if (left.blocks[k].size() == 0 || right.blocks[k].size() == 0) continue;
    sum += left.blocks[k].cwiseProduct(right.blocks[k]).sum();
  }
  return sum;
}

double norm_squared(const MpsState& psi) {
  BondOperator env = identity_operator(psi.bonds[0]);
  const LocalOp id = identity_op(psi.phys_dim());
  for (int i = 0; i < psi.sites; ++i) {
    env = left_transfer(env, psi.tensors[i], psi.bonds[i], psi.bonds[i + 1], id);
  }
  return contract(env, identity_operator(psi.bonds[psi.sites]));
}

double left_canonical_error(const MpsState& psi, int site) {
  const BondOperator env = left_transfer(identity_operator(psi.bonds[site]), psi.tensors[site],
                                         psi.bonds[site], psi.bonds[site + 1],
                                         identity_op(psi.phys_dim()));
  double err = 0.0;
  for (int r = 0; r < psi.bonds[site + 1].sectors(); ++r) {
    const auto dim = psi.bonds[site + 1].dims[r];
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    const auto& b = env.blocks[r];
    err = std::max(err, b.size() == 0 ? 1.0 : (b - id).cwiseAbs().maxCoeff());
  }
  return err;
}

double right_canonical_error(const MpsState& psi, int site) {
  const BondOperator env = right_transfer(identity_operator(psi.bonds[site + 1]),
                                          psi.tensors[site], psi.bonds[site],
                                          psi.bonds[site + 1], identity_op(psi.phys_dim()));
  double err = 0.0;
  for (int l = 0; l < psi.bonds[site].sectors(); ++l) {
    const auto dim = psi.bonds[site].dims[l];
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    const auto& b = env.blocks[l];
    err = std::max(err, b.size() == 0 ? 1.0 : (b - id).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace bhcav::mps
