#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bhcav/lanczos.hpp"
#include "bhcav/model.hpp"

namespace bhcav::exact {

inline constexpr std::size_t kDefaultMaxDimension = 2'000'000;

// Number of occupation vectors of length `sites` summing to `particles` with
// every entry <= n_max. Saturates at SIZE_MAX.
std::size_t basis_dimension(int sites, int particles, int n_max);

// Fixed-N occupation basis in ascending lexicographic order, with an O(M)
// ranking function for the inverse lookup.
class FockBasis {
 public:
  // Throws std::length_error when the dimension exceeds `max_dimension`.
  FockBasis(int sites, int particles, int n_max,
            std::size_t max_dimension = kDefaultMaxDimension);

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  int n_max() const { return n_max_; }
  std::size_t size() const { return size_; }

  std::span<const std::uint8_t> state(std::size_t index) const {
    return {occupations_.data() + index * sites_, static_cast<std::size_t>(sites_)};
  }
  // Throws std::out_of_range for vectors outside the basis.
  std::size_t index_of(std::span<const std::uint8_t> occ) const;

 private:
  // count_[s * (N + 1) + p]: completions of s trailing sites holding p bosons.
  std::size_t count(int s, int p) const;

  int sites_;
  int particles_;
  int n_max_;
  std::size_t size_ = 0;
  std::vector<std::size_t> count_;
  std::vector<std::uint8_t> occupations_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseMatrix build_hamiltonian(const LatticeSpec& spec, const FockBasis& basis);

struct GroundStateVector {
  double energy = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  // Second-lowest eigenvalue minus the lowest; only set when requested.
  double gap = 0.0;
  bool degenerate = false;
};

struct EigenOptions {
  LanczosOptions lanczos{};
  bool check_degeneracy = true;
  double degeneracy_tol = 1e-10;
};

// Throws ConvergenceError if the residual stays above the tolerance.
GroundStateVector ground_state(const SparseMatrix& H, const EigenOptions& opt = {});

ObservableSet measure(const Eigen::VectorXd& state, const FockBasis& basis,
                      const LatticeSpec& spec);

}  // namespace bhcav::exact
