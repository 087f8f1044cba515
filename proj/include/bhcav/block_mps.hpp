#pragma once

// Particle-number conserving matrix-product states.
//
// Every bond carries a graded vector space whose sectors are labeled by the
// number of particles to the left of the bond. A site tensor A^s maps left
// sector q to right sector q + s, so it is stored as one dense block per
// (left sector, physical state) pair.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bhcav::mps {

struct BondSpace {
  std::vector<int> charges;           // ascending
  std::vector<Eigen::Index> dims;

  int sectors() const { return static_cast<int>(charges.size()); }
  // Sector index of `charge`, or -1.
  int find(int charge) const;
  Eigen::Index total_dim() const;
};

// op |s> = amp[s] |s + delta>; entries that would leave [0, d) must be zero.
struct LocalOp {
  int delta = 0;
  std::vector<double> amp;
};

LocalOp identity_op(int d);
LocalOp number_op(int d);
LocalOp number_squared_op(int d);
LocalOp interaction_op(int d, double U);  // (U/2) n (n - 1)
LocalOp create_op(int d);
LocalOp annihilate_op(int d);
LocalOp projector_op(int d, int level);

struct SiteTensor {
  int phys_dim = 0;
  // blocks[l * phys_dim + s] : left.dims[l] x right.dims[right.find(q_l + s)],
  // empty when that right sector does not exist.
  std::vector<Eigen::MatrixXd> blocks;

  Eigen::MatrixXd& block(int l, int s) { return blocks[static_cast<std::size_t>(l) * phys_dim + s]; }
  const Eigen::MatrixXd& block(int l, int s) const {
    return blocks[static_cast<std::size_t>(l) * phys_dim + s];
  }
};

struct SweepRecord {
  int sweep = 0;
  double energy = 0.0;
  double max_truncation = 0.0;  // largest discarded weight in the sweep
  int max_bond = 0;
  int chi = 0;                  // bond-dimension cap used in the sweep
};

struct MpsState {
  int sites = 0;
  int particles = 0;
  int n_max = 0;
  std::vector<BondSpace> bonds;    // sites + 1
  std::vector<SiteTensor> tensors; // sites
  // Orthogonality center: sites left of it are left-canonical, sites right of
  // it right-canonical. -1 when unknown.
  int center = -1;
  std::vector<SweepRecord> log;
  bool converged = false;
  double energy = 0.0;

  int phys_dim() const { return n_max + 1; }
  std::vector<Eigen::Index> bond_dimensions() const;
  Eigen::Index max_bond_dimension() const;
};

// Product Fock state with the given occupations.
MpsState product_state(const std::vector<int>& occupations, int n_max);
// Product state with N bosons spread as evenly as possible over M sites.
MpsState uniform_product_state(int sites, int particles, int n_max);
// Same state with a larger local cutoff (new levels start empty).
MpsState with_cutoff(const MpsState& psi, int n_max);

// Block-sparse operator acting on a bond space; maps ket sector q to bra
// sector q + shift. blocks[k] is indexed by the ket sector and is empty when
// the bra sector is absent or the block is zero.
struct BondOperator {
  int shift = 0;
  std::vector<Eigen::MatrixXd> blocks;

  bool empty() const;
};

BondOperator identity_operator(const BondSpace& bond);
BondOperator zero_operator(const BondSpace& bond, int shift);

// Contract a left environment on bond `left` through one site with `op`:
// E'[q + s] += amp * A^{s'}[q + shift]^T E[q] A^s[q].
BondOperator left_transfer(const BondOperator& env, const SiteTensor& A, const BondSpace& left,
                           const BondSpace& right, const LocalOp& op);

// Contract a right environment on bond `right` through one site with `op`.
BondOperator right_transfer(const BondOperator& env, const SiteTensor& B, const BondSpace& left,
                            const BondSpace& right, const LocalOp& op);

// into += factor * term (shifts must agree).
void accumulate(BondOperator& into, const BondOperator& term, double factor = 1.0);

// sum_q sum_{a,b} L[q](a,b) R[q](a,b) for operators on the same bond.
double contract(const BondOperator& left, const BondOperator& right);

// <psi|psi> by explicit contraction.
double norm_squared(const MpsState& psi);

// Deviation from sum_s A^s^T A^s = 1 (left) or sum_s A^s A^s^T = 1 (right),
// as a max-abs entry error.
double left_canonical_error(const MpsState& psi, int site);
double right_canonical_error(const MpsState& psi, int site);

}  // namespace bhcav::mps
