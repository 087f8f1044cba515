#include "bhcav/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bhcav {

std::string to_string(Backend b) { return b == Backend::exact ? "exact" : "mps"; }

Backend parse_backend(const std::string& name) {
  if (name == "exact") return Backend::exact;
  if (name == "mps") return Backend::mps;
  throw std::invalid_argument("unknown backend '" + name + "' (expected exact or mps)");
}

namespace {

// How many levels to add so the cutoff weight drops below `tol`, assuming the
// occupation tail keeps decaying geometrically. At least one, at most three.
int cutoff_step(const ObservableSet& obs, double tol) {
  const double p = obs.cutoff_weight;
  const double q = obs.below_cutoff_weight;
  if (!(q > p) || !(p > 0.0)) return 1;
  const double levels = std::ceil(std::log(tol / p) / std::log(p / q));
  return static_cast<int>(std::clamp(levels, 1.0, 3.0));
}

class ExactGroundState final : public GroundState {
 public:
  ExactGroundState(const LatticeSpec& spec, const SolveOptions& opt)
      : spec_(spec), basis_(spec.sites, spec.particles, spec.n_max, opt.max_dimension) {
    const auto H = exact::build_hamiltonian(spec_, basis_);
    gs_ = exact::ground_state(H, opt.eigen);
    obs_ = exact::measure(gs_.vector, basis_, spec_);
    obs_.energy = gs_.energy;
  }

  Backend backend() const override { return Backend::exact; }
  const LatticeSpec& spec() const override { return spec_; }
  double energy() const override { return gs_.energy; }
  const ObservableSet& observables() const override { return obs_; }
  bool converged() const override { return true; }
  bool degenerate() const override { return gs_.degenerate; }

 private:
  LatticeSpec spec_;
  exact::FockBasis basis_;
  exact::GroundStateVector gs_;
  ObservableSet obs_;
};

class MpsGroundState final : public GroundState {
 public:
  MpsGroundState(const LatticeSpec& spec, const SolveOptions& opt,
                 std::optional<mps::MpsState> initial)
      : spec_(spec), psi_(mps::dmrg_ground_state(spec, opt.dmrg, std::move(initial))) {
    obs_ = mps::measure_mps(psi_, spec_);
    obs_.energy = psi_.energy;
  }

  Backend backend() const override { return Backend::mps; }
  const LatticeSpec& spec() const override { return spec_; }
  double energy() const override { return psi_.energy; }
  const ObservableSet& observables() const override { return obs_; }
  bool converged() const override { return psi_.converged; }
  bool degenerate() const override { return false; }
  const mps::MpsState& state() const { return psi_; }

 private:
  LatticeSpec spec_;
  mps::MpsState psi_;
  ObservableSet obs_;
};

}  // namespace

std::unique_ptr<GroundState> solve_ground_state(const LatticeSpec& spec_in,
                                                const SolveOptions& opt) {
  LatticeSpec spec = resolved(spec_in);
  if (opt.backend == Backend::exact) {
    auto gs = std::make_unique<ExactGroundState>(spec, opt);
    while (opt.auto_raise_cutoff && spec.n_max < spec.particles &&
           gs->observables().cutoff_weight > opt.cutoff_weight_tol) {
      ++spec.n_max;
      gs = std::make_unique<ExactGroundState>(spec, opt);
    }
    return gs;
  }
  std::optional<mps::MpsState> initial;
  if (!opt.dmrg.checkpoint_path.empty()) {
    try {
      initial = mps::load_checkpoint(opt.dmrg.checkpoint_path);
      if (initial->sites != spec.sites || initial->particles != spec.particles ||
          initial->n_max > spec.n_max) {
        if (initial->sites == spec.sites && initial->particles == spec.particles) {
          spec.n_max = initial->n_max;
        } else {
          initial.reset();
        }
      }
    } catch (const std::runtime_error&) {
      initial.reset();
    }
  }
  auto gs = std::make_unique<MpsGroundState>(spec, opt, std::move(initial));
  while (opt.auto_raise_cutoff && spec.n_max < spec.particles &&
         gs->observables().cutoff_weight > opt.cutoff_weight_tol) {
    // Each DMRG restart is expensive, so move by the estimated distance.
    spec.n_max = std::min(spec.particles,
                          spec.n_max + cutoff_step(gs->observables(), opt.cutoff_weight_tol));
    gs = std::make_unique<MpsGroundState>(spec, opt, mps::with_cutoff(gs->state(), spec.n_max));
  }
  return gs;
}

}  // namespace bhcav
