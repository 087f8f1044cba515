#pragma once

#include <optional>
#include <string>

#include "bhcav/block_mps.hpp"
#include "bhcav/lanczos.hpp"
#include "bhcav/model.hpp"

namespace bhcav::mps {

struct DmrgConfig {
  int chi_max = 128;
  // Sweeps start at chi_start and double until chi_max.
  int chi_start = 16;
  int max_sweeps = 40;
  int min_sweeps = 4;
  // Converged when the energy changes by less than energy_tol * M between
  // consecutive sweeps at the full bond-dimension cap.
  double energy_tol = 1e-9;
  // Singular values smaller than this times the largest one are dropped.
  double truncation_tol = 1e-10;
  // Sweeps below the bond-dimension cap solve to at most 1e-6.
  LanczosOptions lanczos{16, 60, 1e-9};
  // When non-empty, the state is written here after every sweep.
  std::string checkpoint_path;
};

// Chi defaults used for the large chains: 128 up to M = 40, 160 beyond.
int default_chi_max(int sites);

void validate(const DmrgConfig& cfg);

// Two-site DMRG on the fixed-N sector. `initial` (e.g. a checkpoint) replaces
// the unit-filling product start; its cutoff is raised to spec.n_max if
// needed. The returned state has its orthogonality center on site 0 and
// `converged == false` if the sweep limit was reached first.
MpsState dmrg_ground_state(const LatticeSpec& spec, const DmrgConfig& cfg,
                           std::optional<MpsState> initial = std::nullopt);

// Full observable set: B, P, N and every <n_i n_j>. Costs O(M^2 chi^3).
ObservableSet measure_mps(const MpsState& psi, const LatticeSpec& spec);

// Versioned binary checkpoint.
void save_checkpoint(const MpsState& psi, const std::string& path);
MpsState load_checkpoint(const std::string& path);

}  // namespace bhcav::mps
