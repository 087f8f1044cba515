#include "bhcav/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bhcav::exact {

namespace {

std::vector<std::size_t> completion_counts(int sites, int particles, int n_max) {
  constexpr std::size_t kSat = std::numeric_limits<std::size_t>::max();
  const int P = particles + 1;
  std::vector<std::size_t> c(static_cast<std::size_t>(sites + 1) * P, 0);
  c[0] = 1;
  for (int s = 1; s <= sites; ++s) {
    for (int p = 0; p <= particles; ++p) {
      std::size_t total = 0;
      for (int k = 0; k <= std::min(p, n_max); ++k) {
        const std::size_t add = c[(s - 1) * P + (p - k)];
        total = (total > kSat - add) ? kSat : total + add;
      }
      c[s * P + p] = total;
    }
  }
  return c;
}

}  // namespace

std::size_t basis_dimension(int sites, int particles, int n_max) {
  return completion_counts(sites, particles, n_max)[static_cast<std::size_t>(sites) *
                                                        (particles + 1) +
                                                    particles];
}

FockBasis::FockBasis(int sites, int particles, int n_max, std::size_t max_dimension)
    : sites_(sites), particles_(particles), n_max_(n_max) {
  if (sites < 1 || particles < 0 || n_max < 0 || n_max > 255) {
    throw std::invalid_argument("invalid Fock basis parameters");
  }
  count_ = completion_counts(sites, particles, n_max);
  size_ = count(sites, particles);
  if (size_ > max_dimension) {
    throw std::length_error("Fock basis dimension " + std::to_string(size_) +
                            " exceeds the limit " + std::to_string(max_dimension));
  }
  occupations_.resize(size_ * sites_);

  // Ascending lexicographic enumeration: odometer over the leading sites with
  // the last site taking the remainder.
  std::vector<std::uint8_t> occ(sites_, 0);
  std::size_t idx = 0;
  auto emit = [&] {
    std::copy(occ.begin(), occ.end(), occupations_.begin() + idx * sites_);
    ++idx;
  };
  // Recursive fill, smallest values first.
  auto fill = [&](auto&& self, int site, int remaining) -> void {
    if (site == sites_ - 1) {
      if (remaining <= n_max_) {
        occ[site] = static_cast<std::uint8_t>(remaining);
        emit();
      }
      return;
    }
    for (int k = 0; k <= std::min(remaining, n_max_); ++k) {
      if (count(sites_ - site - 1, remaining - k) == 0) continue;
      occ[site] = static_cast<std::uint8_t>(k);
      self(self, site + 1, remaining - k);
    }
  };
  if (size_ > 0) fill(fill, 0, particles_);
}

std::size_t FockBasis::count(int s, int p) const {
  if (p < 0) return 0;
  return count_[static_cast<std::size_t>(s) * (particles_ + 1) + p];
}

std::size_t FockBasis::index_of(std::span<const std::uint8_t> occ) const {
  if (static_cast<int>(occ.size()) != sites_) throw std::out_of_range("wrong vector length");
  std::size_t rank = 0;
  int remaining = particles_;
  for (int i = 0; i < sites_; ++i) {
    const int v = occ[i];
    if (v > n_max_ || v > remaining) throw std::out_of_range("occupation outside the basis");
    for (int k = 0; k < v; ++k) rank += count(sites_ - i - 1, remaining - k);
    remaining -= v;
  }
  if (remaining != 0) throw std::out_of_range("wrong particle number");
  return rank;
}

SparseMatrix build_hamiltonian(const LatticeSpec& spec, const FockBasis& basis) {
  if (basis.sites() != spec.sites || basis.particles() != spec.particles ||
      basis.n_max() != spec.n_max) {
    throw std::invalid_argument("basis does not match the lattice spec");
  }
  const int M = spec.sites;
  const int nmax = spec.n_max;
  const double J = spec.tunneling;
  const double U = spec.interaction;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(basis.size() * (J != 0.0 ? 2 * M : 1));
  std::vector<std::uint8_t> work(M);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto occ = basis.state(k);
    double diag = 0.0;
    for (int i = 0; i < M; ++i) diag += 0.5 * U * occ[i] * (occ[i] - 1);
    triplets.emplace_back(k, k, diag);
    if (J == 0.0) continue;
    std::copy(occ.begin(), occ.end(), work.begin());
    for (int i = 0; i + 1 < M; ++i) {
      // b_i^+ b_{i+1}
      if (occ[i + 1] > 0 && occ[i] < nmax) {
        --work[i + 1];
        ++work[i];
        triplets.emplace_back(k, basis.index_of(work),
                              -J * std::sqrt((occ[i] + 1.0) * occ[i + 1]));
        ++work[i + 1];
        --work[i];
      }
      // b_{i+1}^+ b_i
      if (occ[i] > 0 && occ[i + 1] < nmax) {
        --work[i];
        ++work[i + 1];
        triplets.emplace_back(k, basis.index_of(work),
                              -J * std::sqrt((occ[i + 1] + 1.0) * occ[i]));
        ++work[i];
        --work[i + 1];
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseMatrix H(n, n);
  H.setFromTriplets(triplets.begin(), triplets.end());
  H.makeCompressed();
  return H;
}

GroundStateVector ground_state(const SparseMatrix& H, const EigenOptions& opt) {
  const Eigen::Index n = H.rows();
  if (n == 0 || H.cols() != n) throw std::invalid_argument("Hamiltonian must be square");
  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return H * v; };

  // The Bose-Hubbard ground state has non-negative amplitudes in the Fock
  // basis, so the uniform vector overlaps it.
  Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
  LanczosResult r = lowest_eigenpair(apply, start, opt.lanczos);
  if (!r.converged) {
    throw ConvergenceError("exact ground state did not converge: residual " +
                               std::to_string(r.residual) + " after " +
                               std::to_string(r.matvecs) + " products",
                           r.residual);
  }
  GroundStateVector gs;
  gs.energy = r.eigenvalue;
  gs.vector = std::move(r.vector);
  gs.residual = r.residual;
  if (opt.check_degeneracy && n > 1) {
    LanczosOptions second = opt.lanczos;
    second.tolerance = std::max(opt.lanczos.tolerance, 1e-8);
    const Eigen::VectorXd guard[] = {gs.vector};
    Eigen::VectorXd s2(n);
    for (Eigen::Index i = 0; i < n; ++i) s2(i) = std::cos(0.7 * static_cast<double>(i));
    const LanczosResult excited = lowest_eigenpair(apply, s2, second, guard);
    gs.gap = excited.eigenvalue - gs.energy;
    gs.degenerate = gs.gap < opt.degeneracy_tol;
  }
  return gs;
}

ObservableSet measure(const Eigen::VectorXd& state, const FockBasis& basis,
                      const LatticeSpec& spec) {
  const int M = basis.sites();
  if (static_cast<std::size_t>(state.size()) != basis.size() || M != spec.sites) {
    throw std::invalid_argument("state does not match the basis");
  }
  ObservableSet obs;
  obs.densities = Eigen::VectorXd::Zero(M);
  obs.density_corr = Eigen::MatrixXd::Zero(M, M);
  Eigen::VectorXd cutoff = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd below = Eigen::VectorXd::Zero(M);
  double hop = 0.0;
  std::vector<std::uint8_t> work(M);
  Eigen::VectorXd n(M);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double amp = state(static_cast<Eigen::Index>(k));
    if (amp == 0.0) continue;
    const double p = amp * amp;
    const auto occ = basis.state(k);
    for (int i = 0; i < M; ++i) n(i) = occ[i];
    obs.densities += p * n;
    obs.density_corr.noalias() += p * n * n.transpose();
    for (int i = 0; i < M; ++i) {
      if (occ[i] == basis.n_max()) cutoff(i) += p;
      if (occ[i] + 1 == basis.n_max()) below(i) += p;
    }
    std::copy(occ.begin(), occ.end(), work.begin());
    for (int i = 0; i + 1 < M; ++i) {
      // <v| b_i^+ b_{i+1} |v>; the Hermitian partner contributes equally.
      if (occ[i + 1] > 0 && occ[i] < basis.n_max()) {
        --work[i + 1];
        ++work[i];
        hop += amp * state(static_cast<Eigen::Index>(basis.index_of(work))) *
               std::sqrt((occ[i] + 1.0) * occ[i + 1]);
        ++work[i + 1];
        --work[i];
      }
    }
  }
  obs.B_mean = 2.0 * hop;
  obs.P_mean = obs.density_corr.trace();
  obs.N_mean = obs.densities.sum();
  if (basis.n_max() < basis.particles()) {
    obs.cutoff_weight = cutoff.maxCoeff();
    obs.below_cutoff_weight = below.maxCoeff();
  }
  obs.energy = energy_from_parts(spec, obs);
  return obs;
}

}  // namespace bhcav::exact
