#include "bhcav/lattice_optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bhcav/text_format.hpp"

namespace bhcav::optics {

namespace {

constexpr double kPi = std::numbers::pi;

// Bloch Hamiltonian in the plane-wave basis e^{i pi (kappa + 2G) x / d}:
// kinetic (kappa + 2G)^2 plus V0 sin^2 = V0/2 - V0/4 (e^{2 pi i x/d} + c.c.).
Eigen::MatrixXd bloch_hamiltonian(double kappa, const LatticePotential& pot) {
  const int K = pot.cutoff;
  const int n = 2 * K + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double g = kappa + 2.0 * (a - K);
    h(a, a) = g * g + 0.5 * pot.depth;
    if (a + 1 < n) {
      h(a, a + 1) = -0.25 * pot.depth;
      h(a + 1, a) = -0.25 * pot.depth;
    }
  }
  return h;
}

}  // namespace

void validate(const LatticePotential& pot) {
  if (pot.cutoff < 8) {
    throw std::invalid_argument("plane-wave cutoff K=" + std::to_string(pot.cutoff) +
                                " is below the minimum of 8");
  }
  if (!(pot.depth >= 0.0) || !std::isfinite(pot.depth)) {
    throw std::invalid_argument("lattice depth must be finite and non-negative");
  }
  if (!(pot.period > 0.0)) {
    throw std::invalid_argument("lattice period must be positive");
  }
}

double BandStructure::lowest_band_width() const {
  return energies.col(0).maxCoeff() - energies.col(0).minCoeff();
}

double BandStructure::band_gap() const {
  return energies.col(1).minCoeff() - energies.col(0).maxCoeff();
}

BandStructure solve_bands(const LatticePotential& pot, int cells) {
  validate(pot);
  if (cells < 2) throw std::invalid_argument("need at least two quasi-momenta");

  const int n = 2 * pot.cutoff + 1;
  BandStructure bands;
  bands.potential = pot;
  bands.energies.resize(cells, n);
  bands.lowest_band.resize(n, cells);

  for (int k = 0; k < cells; ++k) {
    const double kappa = -1.0 + 2.0 * k / cells;
    bands.quasi_momenta.push_back(kappa);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bloch_hamiltonian(kappa, pot));
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("Bloch eigensolve failed at quasi-momentum " +
                               std::to_string(kappa) + " with cutoff K=" +
                               std::to_string(pot.cutoff));
    }
    bands.energies.row(k) = es.eigenvalues().transpose();
    Eigen::VectorXd c = es.eigenvectors().col(0);
    // psi(0) = sum_G c_G; fix the sign so the Bloch function is positive there.
    if (c.sum() < 0.0) c = -c;
    bands.lowest_band.col(k) = c;
  }
  return bands;
}

WannierFunction::WannierFunction(std::vector<double> samples, std::vector<double> kinetic,
                                 double step, int cells, double period)
    : samples_(std::move(samples)),
      kinetic_(std::move(kinetic)),
      step_(step),
      cells_(cells),
      period_(period) {
  if (samples_.size() != kinetic_.size() || cells_ <= 0 ||
      samples_.size() % static_cast<std::size_t>(cells_) != 0) {
    throw std::invalid_argument("inconsistent Wannier sampling");
  }
}

double WannierFunction::position(std::size_t k) const {
  return (-0.5 * cells_ * period_) + static_cast<double>(k) * step_;
}

std::size_t WannierFunction::wrap(long long k) const {
  const auto n = static_cast<long long>(samples_.size());
  k %= n;
  if (k < 0) k += n;
  return static_cast<std::size_t>(k);
}

double WannierFunction::at_site(int site, std::size_t k) const {
  return samples_[wrap(static_cast<long long>(k) -
                       static_cast<long long>(site) * points_per_cell())];
}

double WannierFunction::kinetic_at_site(int site, std::size_t k) const {
  return kinetic_[wrap(static_cast<long long>(k) -
                       static_cast<long long>(site) * points_per_cell())];
}

WannierFunction build_wannier(const BandStructure& bands, int grid_points) {
  const double gap = bands.band_gap();
  if (!(gap > 1e-6)) {
    throw std::runtime_error("lowest band is not isolated (gap " + std::to_string(gap) +
                             " E_r at V0=" + std::to_string(bands.potential.depth) +
                             "); cannot build a localized Wannier function");
  }
  const int cells = bands.cells();
  if (grid_points <= 0 || grid_points % cells != 0) {
    throw std::invalid_argument("grid points must be a positive multiple of the cell count");
  }
  const int K = bands.potential.cutoff;
  const double d = bands.potential.period;
  const double step = cells * d / grid_points;
  const double scale = 1.0 / (cells * std::sqrt(d));

  std::vector<double> w(grid_points, 0.0);
  std::vector<double> t(grid_points, 0.0);
  for (int k = 0; k < cells; ++k) {
    const double kappa = bands.quasi_momenta[k];
    const auto c = bands.lowest_band.col(k);
    for (int a = 0; a < 2 * K + 1; ++a) {
      const double g = kappa + 2.0 * (a - K);
      const double amp = c(a) * scale;
      for (int p = 0; p < grid_points; ++p) {
        const double x = (-0.5 * cells + static_cast<double>(p) * cells / grid_points);
        const double cv = std::cos(kPi * g * x);
        w[p] += amp * cv;
        t[p] += amp * g * g * cv;
      }
    }
  }
  return WannierFunction(std::move(w), std::move(t), step, cells, d);
}

double mode_profile(Mode mode, double x, double period) {
  switch (mode) {
    case Mode::uniform:
      return 1.0;
    case Mode::sine:
      return std::sin(kPi * x / period);
    case Mode::cosine:
      return std::cos(kPi * x / period);
  }
  return 0.0;
}

double mode_overlap(const WannierFunction& w, Mode l, Mode m, int i, int j, int stride) {
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); k += static_cast<std::size_t>(stride)) {
    const double x = w.position(k);
    sum += w.at_site(i, k) * mode_profile(l, x, w.period()) * mode_profile(m, x, w.period()) *
           w.at_site(j, k);
  }
  return sum * w.step() * stride;
}

double classical_overlap(const WannierFunction& w, const LatticePotential& pot, int i, int j,
                         int stride) {
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); k += static_cast<std::size_t>(stride)) {
    const double s = std::sin(kPi * w.position(k) / w.period());
    const double v = pot.depth * s * s;
    sum += w.at_site(i, k) * (w.kinetic_at_site(j, k) + v * w.at_site(j, k));
  }
  return sum * w.step() * stride;
}

namespace {

OverlapTable overlaps_with_stride(const WannierFunction& w, const LatticePotential& pot,
                                  int stride) {
  OverlapTable t;
  t.J_cl_onsite = classical_overlap(w, pot, 0, 0, stride);
  t.J_cl_hop = -classical_overlap(w, pot, 0, 1, stride);
  double w4 = 0.0;
  for (std::size_t k = 0; k < w.size(); k += static_cast<std::size_t>(stride)) {
    const double v = w.samples()[k];
    w4 += v * v * v * v;
  }
  t.U_int = w4 * w.step() * stride;
  t.J11_onsite = mode_overlap(w, Mode::sine, Mode::sine, 0, 0, stride);
  t.J11_hop = mode_overlap(w, Mode::sine, Mode::sine, 0, 1, stride);
  t.J20 = mode_overlap(w, Mode::cosine, Mode::uniform, 0, 0, stride);
  t.J20_hop = mode_overlap(w, Mode::cosine, Mode::uniform, 0, 1, stride);
  return t;
}

}  // namespace

OverlapTable compute_overlaps(const WannierFunction& w, const LatticePotential& pot,
                              double self_consistency_tol) {
  const OverlapTable fine = overlaps_with_stride(w, pot, 1);
  if (w.points_per_cell() % 2 != 0) {
    throw std::runtime_error("grid too coarse: need an even number of points per cell");
  }
  const OverlapTable coarse = overlaps_with_stride(w, pot, 2);
  const auto a = fine.entries();
  const auto b = coarse.entries();
  for (const auto& [name, value] : a) {
    const double other = b.at(name);
    const double scale = std::max(std::abs(value), std::abs(other));
    if (std::abs(value - other) > self_consistency_tol * scale + 1e-12) {
      std::ostringstream msg;
      msg << "grid too coarse: overlap " << name << " changes from " << value << " to "
          << other << " when the quadrature step is doubled";
      throw std::runtime_error(msg.str());
    }
  }
  return fine;
}

OverlapTable compute_overlaps(const LatticePotential& pot, int grid_points, int cells) {
  const BandStructure bands = solve_bands(pot, cells);
  return compute_overlaps(build_wannier(bands, grid_points), pot);
}

std::map<std::string, double> OverlapTable::entries() const {
  return {{"J_cl_onsite", J_cl_onsite}, {"J_cl_hop", J_cl_hop}, {"U_int", U_int},
          {"J11_onsite", J11_onsite},   {"J11_hop", J11_hop},   {"J20", J20},
          {"J20_hop", J20_hop}};
}

OverlapTable OverlapTable::from_entries(const std::map<std::string, double>& kv) {
  auto get = [&](const char* name) {
    auto it = kv.find(name);
    if (it == kv.end()) {
      throw std::runtime_error(std::string("overlap table is missing entry ") + name);
    }
    return it->second;
  };
  OverlapTable t;
  t.J_cl_onsite = get("J_cl_onsite");
  t.J_cl_hop = get("J_cl_hop");
  t.U_int = get("U_int");
  t.J11_onsite = get("J11_onsite");
  t.J11_hop = get("J11_hop");
  t.J20 = get("J20");
  t.J20_hop = get("J20_hop");
  return t;
}

void write_overlap_table(std::ostream& os, const OverlapTable& table) {
  for (const auto& [name, value] : table.entries()) {
    os << name << " = " << format_exact(value) << '\n';
  }
}

OverlapTable read_overlap_table(std::istream& is) {
  std::map<std::string, double> kv;
  for (const auto& [key, text] : parse_key_values(is)) {
    kv[key] = parse_double(text, key);
  }
  return OverlapTable::from_entries(kv);
}

OverlapTable read_overlap_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open overlap table " + path);
  return read_overlap_table(in);
}

}  // namespace bhcav::optics
