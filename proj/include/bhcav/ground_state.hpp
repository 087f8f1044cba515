#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "bhcav/dmrg.hpp"
#include "bhcav/exact_solver.hpp"
#include "bhcav/model.hpp"

namespace bhcav {

enum class Backend { exact, mps };

std::string to_string(Backend b);
// "exact" or "mps"; throws std::invalid_argument otherwise.
Backend parse_backend(const std::string& name);

// Solved ground state behind either backend.
class GroundState {
 public:
  virtual ~GroundState() = default;

  virtual Backend backend() const = 0;
  // Spec actually solved (n_max may have been raised).
  virtual const LatticeSpec& spec() const = 0;
  // Eigenvalue (exact) or final sweep energy (MPS).
  virtual double energy() const = 0;
  virtual const ObservableSet& observables() const = 0;
  virtual bool converged() const = 0;
  virtual bool degenerate() const = 0;
};

struct SolveOptions {
  Backend backend = Backend::exact;
  mps::DmrgConfig dmrg{};
  exact::EigenOptions eigen{};
  std::size_t max_dimension = exact::kDefaultMaxDimension;
  // Raise n_max by one and re-solve while the weight on the cutoff level
  // exceeds cutoff_weight_tol.
  bool auto_raise_cutoff = true;
  double cutoff_weight_tol = 1e-10;
};

std::unique_ptr<GroundState> solve_ground_state(const LatticeSpec& spec,
                                                const SolveOptions& opt = {});

}  // namespace bhcav
