#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace bhcav::optics {

// Energies are in recoil units E_r = hbar^2 pi^2 / (2 m d^2). Lengths are in
// units of the lattice period unless `period` is changed.
struct LatticePotential {
  double depth = 10.0;   // V0 in E_r; V(x) = V0 sin^2(pi x / d)
  double period = 1.0;   // d
  int cutoff = 16;       // plane waves G = -K..K
};

void validate(const LatticePotential& pot);

struct BandStructure {
  LatticePotential potential;
  // Quasi-momenta in units of pi/d on the uniform grid -1 + 2k/L, k = 0..L-1.
  std::vector<double> quasi_momenta;
  // energies(k, band), ascending in band index.
  Eigen::MatrixXd energies;
  // Real plane-wave coefficients of the lowest band, one column per
  // quasi-momentum, gauge fixed so the Bloch function is positive at x = 0.
  Eigen::MatrixXd lowest_band;

  int cells() const { return static_cast<int>(quasi_momenta.size()); }
  double lowest_band_width() const;
  // Smallest separation between the lowest two bands over the sampled grid.
  double band_gap() const;
};

// Plane-wave diagonalization on `cells` quasi-momenta. Throws
// std::invalid_argument for cutoff < 8 and std::runtime_error when the
// eigensolver fails.
BandStructure solve_bands(const LatticePotential& pot, int cells = 8);

// Lowest-band Wannier function centered at x = 0, sampled over one periodic
// supercell of `cells` periods. Translations by whole sites are exact circular
// shifts of the samples.
class WannierFunction {
 public:
  WannierFunction(std::vector<double> samples, std::vector<double> kinetic,
                  double step, int cells, double period);

  const std::vector<double>& samples() const { return samples_; }
  // -(hbar^2/2m) w'' sampled on the same grid, in E_r.
  const std::vector<double>& kinetic() const { return kinetic_; }
  double step() const { return step_; }
  int cells() const { return cells_; }
  double period() const { return period_; }
  int points_per_cell() const { return static_cast<int>(samples_.size()) / cells_; }
  std::size_t size() const { return samples_.size(); }
  // Grid coordinate of sample k; the grid starts at -cells*d/2.
  double position(std::size_t k) const;
  // Sample k of w(x - site*d).
  double at_site(int site, std::size_t k) const;
  double kinetic_at_site(int site, std::size_t k) const;

 private:
  std::size_t wrap(long long k) const;

  std::vector<double> samples_;
  std::vector<double> kinetic_;
  double step_;
  int cells_;
  double period_;
};

// Throws std::runtime_error when the lowest band is not isolated.
WannierFunction build_wannier(const BandStructure& bands, int grid_points = 2048);

// Cavity and pump mode profiles: u0 = 1, u1 = sin(pi x/d), u2 = cos(pi x/d).
enum class Mode { uniform = 0, sine = 1, cosine = 2 };

double mode_profile(Mode mode, double x, double period);

// J^{lm}_{ij} = \int w(x - x_i) u_l(x) u_m(x) w(x - x_j) dx.
// `stride` > 1 evaluates the quadrature on every stride-th sample.
double mode_overlap(const WannierFunction& w, Mode l, Mode m, int i, int j,
                    int stride = 1);

// J^{cl}_{ij} = \int w(x - x_i) h_A w(x - x_j) dx in E_r.
double classical_overlap(const WannierFunction& w, const LatticePotential& pot,
                         int i, int j, int stride = 1);

struct OverlapTable {
  double J_cl_onsite = 0.0;  // E_r
  double J_cl_hop = 0.0;     // E_r, the Bose-Hubbard tunneling J (positive)
  double U_int = 0.0;        // \int w^4 dx, 1/length
  double J11_onsite = 0.0;
  double J11_hop = 0.0;
  double J20 = 0.0;          // J^{20}_{ii} = (-1)^i J20
  double J20_hop = 0.0;      // J^{20}_{i,i+1}, zero by reflection symmetry

  std::map<std::string, double> entries() const;
  static OverlapTable from_entries(const std::map<std::string, double>& kv);
};

// Fills every entry by quadrature and cross-checks against the half-density
// grid; throws std::runtime_error if any entry moves by more than
// `self_consistency_tol` (relative).
OverlapTable compute_overlaps(const WannierFunction& w, const LatticePotential& pot,
                              double self_consistency_tol = 1e-6);

OverlapTable compute_overlaps(const LatticePotential& pot, int grid_points = 2048,
                              int cells = 8);

// Plain text, one `name value` pair per line; '#' starts a comment.
void write_overlap_table(std::ostream& os, const OverlapTable& table);
OverlapTable read_overlap_table(std::istream& is);
OverlapTable read_overlap_table_file(const std::string& path);

}  // namespace bhcav::optics
