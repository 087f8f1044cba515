#include "bhcav/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace bhcav::mps {

int default_chi_max(int sites) { return sites <= 40 ? 128 : 160; }

void validate(const DmrgConfig& cfg) {
  if (cfg.chi_max < 16) throw std::invalid_argument("chi_max must be at least 16");
  if (!(cfg.energy_tol > 0.0)) throw std::invalid_argument("energy tolerance must be positive");
  if (!(cfg.truncation_tol >= 0.0)) throw std::invalid_argument("negative truncation tolerance");
  if (cfg.max_sweeps < 1 || cfg.chi_start < 1) throw std::invalid_argument("bad sweep settings");
}

namespace {

// Environment of a block of sites, expressed on the boundary bond: the block
// Hamiltonian plus the boundary-site ladder operators needed to couple it to
// the next site. For a left block `up` is b^+ on its last site; for a right
// block `up` is b on its first site (both raise the bond charge by one).
struct Environment {
  BondOperator H;
  BondOperator up;
  BondOperator down;
};

// Flat storage of a two-site wavefunction: one column-major block per
// (left sector, s1, s2) whose right sector exists.
struct TwoSiteLayout {
  struct Block {
    int l, s1, s2, r;
    Eigen::Index offset, rows, cols;
  };
  int d = 0;
  std::vector<Block> blocks;
  std::vector<int> index;
  Eigen::Index size = 0;

  int find(int l, int s1, int s2) const {
    return index[(static_cast<std::size_t>(l) * d + s1) * d + s2];
  }
};

TwoSiteLayout make_layout(const BondSpace& left, const BondSpace& right, int d) {
  TwoSiteLayout lay;
  lay.d = d;
  lay.index.assign(static_cast<std::size_t>(left.sectors()) * d * d, -1);
  for (int l = 0; l < left.sectors(); ++l) {
    for (int s1 = 0; s1 < d; ++s1) {
      for (int s2 = 0; s2 < d; ++s2) {
        const int r = right.find(left.charges[l] + s1 + s2);
        if (r < 0) continue;
        lay.index[(static_cast<std::size_t>(l) * d + s1) * d + s2] =
            static_cast<int>(lay.blocks.size());
        lay.blocks.push_back({l, s1, s2, r, lay.size, left.dims[l], right.dims[r]});
        lay.size += left.dims[l] * right.dims[r];
      }
    }
  }
  return lay;
}

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using MutMap = Eigen::Map<Eigen::MatrixXd>;

class Engine {
 public:
  Engine(const LatticeSpec& spec, const DmrgConfig& cfg, MpsState psi, bool warm)
      : spec_(spec), cfg_(cfg), psi_(std::move(psi)), warm_(warm) {
    const int d = psi_.phys_dim();
    identity_ = identity_op(d);
    onsite_ = interaction_op(d, spec_.interaction);
    create_ = create_op(d);
    annihilate_ = annihilate_op(d);
  }

  MpsState run() {
    const int M = psi_.sites;
    left_.assign(M + 1, {});
    right_.assign(M + 1, {});
    left_[0] = {zero_operator(psi_.bonds[0], 0), zero_operator(psi_.bonds[0], +1),
                zero_operator(psi_.bonds[0], -1)};
    right_[M] = {zero_operator(psi_.bonds[M], 0), zero_operator(psi_.bonds[M], +1),
                 zero_operator(psi_.bonds[M], -1)};
    for (int i = M - 1; i >= 1; --i) right_[i] = grow_right(i);

    double previous = std::numeric_limits<double>::infinity();
    psi_.converged = false;
    const int first_sweep = static_cast<int>(psi_.log.size());
    // A resumed state keeps its bond dimension instead of restarting the ramp.
    const long long chi0 = std::max<long long>(cfg_.chi_start, psi_.max_bond_dimension());
    // A warm start has no ramp to sit through; two sweeps give an energy change.
    const int min_sweeps = warm_ ? std::min(cfg_.min_sweeps, 2) : cfg_.min_sweeps;
    for (int sweep = 0; sweep < cfg_.max_sweeps; ++sweep) {
      const int chi = static_cast<int>(std::min<long long>(cfg_.chi_max, chi0 << std::min(sweep, 20)));
      double max_trunc = 0.0;
      double energy = 0.0;
      lanczos_ = cfg_.lanczos;
      if (chi < cfg_.chi_max) lanczos_.tolerance = std::max(lanczos_.tolerance, 1e-6);
      for (int i = 0; i + 1 < M; ++i) {
        energy = optimize(i, true, chi, max_trunc);
        left_[i + 1] = grow_left(i);
      }
      for (int i = M - 2; i >= 0; --i) {
        energy = optimize(i, false, chi, max_trunc);
        right_[i + 1] = grow_right(i + 1);
      }
      psi_.center = 0;
      psi_.energy = energy;
      const auto max_bond = static_cast<int>(psi_.max_bond_dimension());
      psi_.log.push_back({first_sweep + sweep, energy, max_trunc, max_bond, chi});

      const bool full_chi = chi >= cfg_.chi_max;
      if (sweep + 1 >= min_sweeps && full_chi &&
          std::abs(energy - previous) < cfg_.energy_tol * M) {
        psi_.converged = true;
      }
      previous = energy;
      if (!cfg_.checkpoint_path.empty()) save_checkpoint(psi_, cfg_.checkpoint_path);
      if (psi_.converged) break;
    }
    return std::move(psi_);
  }

 private:
  Environment grow_left(int i) const {
    const auto& A = psi_.tensors[i];
    const auto& bl = psi_.bonds[i];
    const auto& br = psi_.bonds[i + 1];
    const BondOperator id = identity_operator(bl);
    const auto& env = left_[i];
    Environment out;
    out.H = left_transfer(env.H, A, bl, br, identity_);
    accumulate(out.H, left_transfer(id, A, bl, br, onsite_));
    accumulate(out.H, left_transfer(env.up, A, bl, br, annihilate_), -spec_.tunneling);
    accumulate(out.H, left_transfer(env.down, A, bl, br, create_), -spec_.tunneling);
    out.up = left_transfer(id, A, bl, br, create_);
    out.down = left_transfer(id, A, bl, br, annihilate_);
    return out;
  }

  Environment grow_right(int i) const {
    const auto& B = psi_.tensors[i];
    const auto& bl = psi_.bonds[i];
    const auto& br = psi_.bonds[i + 1];
    const BondOperator id = identity_operator(br);
    const auto& env = right_[i + 1];
    Environment out;
    out.H = right_transfer(env.H, B, bl, br, identity_);
    accumulate(out.H, right_transfer(id, B, bl, br, onsite_));
    accumulate(out.H, right_transfer(env.up, B, bl, br, create_), -spec_.tunneling);
    accumulate(out.H, right_transfer(env.down, B, bl, br, annihilate_), -spec_.tunneling);
    out.up = right_transfer(id, B, bl, br, annihilate_);
    out.down = right_transfer(id, B, bl, br, create_);
    return out;
  }

  Eigen::VectorXd form_theta(int i, const TwoSiteLayout& lay) const {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(lay.size);
    const auto& left = psi_.bonds[i];
    const auto& mid = psi_.bonds[i + 1];
    for (const auto& b : lay.blocks) {
      const int m = mid.find(left.charges[b.l] + b.s1);
      if (m < 0) continue;
      const auto& A = psi_.tensors[i].block(b.l, b.s1);
      const auto& B = psi_.tensors[i + 1].block(m, b.s2);
      if (A.size() == 0 || B.size() == 0) continue;
      MutMap(theta.data() + b.offset, b.rows, b.cols).noalias() = A * B;
    }
    return theta;
  }

  Eigen::VectorXd apply_heff(int i, const TwoSiteLayout& lay, const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(lay.size);
    const auto& L = left_[i];
    const auto& R = right_[i + 2];
    const auto& left = psi_.bonds[i];
    const double J = spec_.tunneling;
    const int d = lay.d;
    auto target = [&](int idx) {
      const auto& t = lay.blocks[idx];
      return MutMap(y.data() + t.offset, t.rows, t.cols);
    };
    for (const auto& b : lay.blocks) {
      const ConstMap X(x.data() + b.offset, b.rows, b.cols);
      MutMap Y(y.data() + b.offset, b.rows, b.cols);
      if (L.H.blocks[b.l].size() != 0) Y.noalias() += L.H.blocks[b.l] * X;
      if (R.H.blocks[b.r].size() != 0) Y.noalias() += X * R.H.blocks[b.r].transpose();
      Y += (onsite_.amp[b.s1] + onsite_.amp[b.s2]) * X;
      if (J == 0.0) continue;

      const int q = left.charges[b.l];
      // b^+_{i-1} b_i and b_{i-1} b^+_i
      if (b.s1 >= 1 && L.up.blocks[b.l].size() != 0) {
        const int t = lay.find(left.find(q + 1), b.s1 - 1, b.s2);
        if (t >= 0) target(t).noalias() += (-J * std::sqrt(b.s1)) * L.up.blocks[b.l] * X;
      }
      if (b.s1 + 1 < d && L.down.blocks[b.l].size() != 0) {
        const int t = lay.find(left.find(q - 1), b.s1 + 1, b.s2);
        if (t >= 0) target(t).noalias() += (-J * std::sqrt(b.s1 + 1.0)) * L.down.blocks[b.l] * X;
      }
      // b^+_i b_{i+1} and b_i b^+_{i+1}
      if (b.s1 + 1 < d && b.s2 >= 1) {
        const int t = lay.find(b.l, b.s1 + 1, b.s2 - 1);
        if (t >= 0) target(t) += (-J * std::sqrt((b.s1 + 1.0) * b.s2)) * X;
      }
      if (b.s1 >= 1 && b.s2 + 1 < d) {
        const int t = lay.find(b.l, b.s1 - 1, b.s2 + 1);
        if (t >= 0) target(t) += (-J * std::sqrt(b.s1 * (b.s2 + 1.0))) * X;
      }
      // b^+_{i+1} b_{i+2} and b_{i+1} b^+_{i+2}
      if (b.s2 + 1 < d && R.up.blocks[b.r].size() != 0) {
        const int t = lay.find(b.l, b.s1, b.s2 + 1);
        if (t >= 0) {
          target(t).noalias() += (-J * std::sqrt(b.s2 + 1.0)) * X * R.up.blocks[b.r].transpose();
        }
      }
      if (b.s2 >= 1 && R.down.blocks[b.r].size() != 0) {
        const int t = lay.find(b.l, b.s1, b.s2 - 1);
        if (t >= 0) {
          target(t).noalias() += (-J * std::sqrt(b.s2)) * X * R.down.blocks[b.r].transpose();
        }
      }
    }
    return y;
  }

  double optimize(int i, bool move_right, int chi, double& max_trunc) {
    const TwoSiteLayout lay =
        make_layout(psi_.bonds[i], psi_.bonds[i + 2], psi_.phys_dim());
    if (lay.size == 0) throw std::logic_error("empty two-site space");
    Eigen::VectorXd theta = form_theta(i, lay);
    auto apply = [&](const Eigen::VectorXd& v) { return apply_heff(i, lay, v); };
    const LanczosResult res = lowest_eigenpair(apply, std::move(theta), lanczos_);
    max_trunc = std::max(max_trunc, split(i, lay, res.vector, move_right, chi));
    return res.eigenvalue;
  }

  // SVD of the two-site wavefunction sector by sector of the middle charge,
  // truncated globally. Returns the discarded weight.
  double split(int i, const TwoSiteLayout& lay, const Eigen::VectorXd& theta, bool move_right,
               int chi) {
    const auto& left = psi_.bonds[i];
    const auto& right = psi_.bonds[i + 2];
    const int d = lay.d;

    struct Group {
      int a, b;  // (l, s1) for rows, (s2, r) for cols
      Eigen::Index offset, dim;
    };
    struct Sector {
      int charge;
      std::vector<Group> rows, cols;
      Eigen::MatrixXd U, V;
      Eigen::VectorXd S;
      Eigen::Index keep = 0;
    };
    std::map<int, Sector> by_charge;
    for (int l = 0; l < left.sectors(); ++l) {
      for (int s1 = 0; s1 < d; ++s1) {
        auto& sec = by_charge[left.charges[l] + s1];
        sec.charge = left.charges[l] + s1;
        const Eigen::Index off = sec.rows.empty() ? 0 : sec.rows.back().offset + sec.rows.back().dim;
        sec.rows.push_back({l, s1, off, left.dims[l]});
      }
    }
    std::vector<Sector> sectors;
    for (auto& [qm, sec] : by_charge) {
      for (int s2 = 0; s2 < d; ++s2) {
        const int r = right.find(qm + s2);
        if (r < 0) continue;
        const Eigen::Index off = sec.cols.empty() ? 0 : sec.cols.back().offset + sec.cols.back().dim;
        sec.cols.push_back({s2, r, off, right.dims[r]});
      }
      if (sec.cols.empty()) continue;
      const Eigen::Index nr = sec.rows.back().offset + sec.rows.back().dim;
      const Eigen::Index nc = sec.cols.back().offset + sec.cols.back().dim;
      Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(nr, nc);
      bool nonzero = false;
      for (const auto& rg : sec.rows) {
        for (const auto& cg : sec.cols) {
          const int idx = lay.find(rg.a, rg.b, cg.a);
          if (idx < 0) continue;
          const auto& blk = lay.blocks[idx];
          mat.block(rg.offset, cg.offset, rg.dim, cg.dim) =
              ConstMap(theta.data() + blk.offset, blk.rows, blk.cols);
          nonzero = true;
        }
      }
      if (!nonzero) continue;
      Eigen::BDCSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
      sec.U = svd.matrixU();
      sec.V = svd.matrixV();
      sec.S = svd.singularValues();
      sectors.push_back(std::move(sec));
    }

    // Global truncation over all sectors.
    struct Value {
      double sigma;
      int sector;
    };
    std::vector<Value> values;
    double total = 0.0;
    for (int k = 0; k < static_cast<int>(sectors.size()); ++k) {
      for (Eigen::Index j = 0; j < sectors[k].S.size(); ++j) {
        values.push_back({sectors[k].S(j), k});
        total += sectors[k].S(j) * sectors[k].S(j);
      }
    }
    std::stable_sort(values.begin(), values.end(),
                     [](const Value& x, const Value& y) { return x.sigma > y.sigma; });
    std::size_t keep = std::min<std::size_t>(values.size(), static_cast<std::size_t>(chi));
    double discarded = 0.0;
    for (std::size_t j = keep; j < values.size(); ++j) discarded += values[j].sigma * values[j].sigma;
    // Singular values below truncation_tol relative to the largest are dropped
    // even under the bond cap. A discarded-weight rule at the same number
    // leaves ~1e-7 errors in density correlations.
    const double floor = std::max(cfg_.truncation_tol, 1e-15) * values[0].sigma;
    while (keep > 1 && values[keep - 1].sigma <= floor) {
      discarded += values[keep - 1].sigma * values[keep - 1].sigma;
      --keep;
    }
    for (std::size_t j = 0; j < keep; ++j) ++sectors[values[j].sector].keep;
    const double kept_norm = std::sqrt(std::max(total - discarded, 1e-300));

    BondSpace mid;
    for (const auto& sec : sectors) {
      if (sec.keep == 0) continue;
      mid.charges.push_back(sec.charge);
      mid.dims.push_back(sec.keep);
    }

    SiteTensor A;
    A.phys_dim = d;
    A.blocks.assign(static_cast<std::size_t>(left.sectors()) * d, Eigen::MatrixXd());
    SiteTensor B;
    B.phys_dim = d;
    B.blocks.assign(static_cast<std::size_t>(mid.sectors()) * d, Eigen::MatrixXd());
    int m = 0;
    for (const auto& sec : sectors) {
      if (sec.keep == 0) continue;
      const Eigen::VectorXd s = sec.S.head(sec.keep) / kept_norm;
      for (const auto& rg : sec.rows) {
        Eigen::MatrixXd u = sec.U.block(rg.offset, 0, rg.dim, sec.keep);
        if (!move_right) u = u * s.asDiagonal();
        A.block(rg.a, rg.b) = std::move(u);
      }
      for (const auto& cg : sec.cols) {
        Eigen::MatrixXd v = sec.V.block(cg.offset, 0, cg.dim, sec.keep).transpose();
        if (move_right) v = s.asDiagonal() * v;
        B.block(m, cg.a) = std::move(v);
      }
      ++m;
    }
    psi_.bonds[i + 1] = std::move(mid);
    psi_.tensors[i] = std::move(A);
    psi_.tensors[i + 1] = std::move(B);
    psi_.center = move_right ? i + 1 : i;
    return total > 0.0 ? discarded / total : 0.0;
  }

  LatticeSpec spec_;
  DmrgConfig cfg_;
  MpsState psi_;
  bool warm_;
  LanczosOptions lanczos_;
  LocalOp identity_, onsite_, create_, annihilate_;
  std::vector<Environment> left_, right_;
};

}  // namespace

MpsState dmrg_ground_state(const LatticeSpec& spec_in, const DmrgConfig& cfg,
                           std::optional<MpsState> initial) {
  const LatticeSpec spec = resolved(spec_in);
  validate(cfg);
  MpsState psi;
  const bool warm = initial.has_value();
  if (initial) {
    psi = std::move(*initial);
    if (psi.sites != spec.sites || psi.particles != spec.particles) {
      throw std::invalid_argument("initial state does not match the lattice");
    }
    if (psi.center != 0) {
      throw std::invalid_argument("initial state must have its orthogonality center on site 0");
    }
    if (psi.n_max < spec.n_max) psi = with_cutoff(psi, spec.n_max);
    if (psi.n_max != spec.n_max) {
      throw std::invalid_argument("initial state has a larger cutoff than the lattice");
    }
  } else {
    psi = uniform_product_state(spec.sites, spec.particles, spec.n_max);
  }
  Engine engine(spec, cfg, std::move(psi), warm);
  return engine.run();
}

}  // namespace bhcav::mps
