#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bhcav/estimator.hpp"
#include "bhcav/ground_state.hpp"

namespace bhcav::experiments {

// 30 log-spaced points in [0.01, 0.6].
std::vector<double> default_grid();
std::vector<double> log_grid(double lo, double hi, int count);
// "a,b,c" or "lo:hi:count" (log-spaced).
std::vector<double> parse_grid(const std::string& text);

struct SweepConfig {
  std::vector<double> j_over_u = default_grid();
  int sites = 40;
  int particles = 40;
  double interaction = 1.0;
  int n_max = 0;  // 0: default cutoff, raised automatically
  Backend backend = Backend::mps;
  mps::DmrgConfig dmrg{};
  CavityParams cavity{};
  double n_error = 0.10;
  double dj = 0.01;  // quench step in units of U (fig3)
  int threads = 1;
  std::string out_dir = ".";
  // Overlap table: read from `overlaps_path` if set, else computed from the
  // lattice parameters below.
  std::string overlaps_path;
  double v0 = 10.0;
  int plane_waves = 16;
  int grid_points = 2048;
  // When set, each DMRG point checkpoints to and resumes from this directory.
  std::string checkpoint_dir;
};

// Throws std::invalid_argument: empty or unsorted grid, negative J/U, exact
// backend over the basis-size limit, bad DMRG settings.
void validate(const SweepConfig& cfg);

// Flat key/value form used for config files and CSV provenance.
std::vector<std::pair<std::string, std::string>> config_entries(const SweepConfig& cfg);
// Applies entries on top of `cfg`; unknown keys throw std::invalid_argument.
void apply_entries(SweepConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv);
SweepConfig read_config_file(const std::string& path, SweepConfig base = {});

optics::OverlapTable load_overlaps(const SweepConfig& cfg);

struct PointResult {
  double j_over_u = 0.0;
  LatticeSpec spec;  // as solved, n_max included
  ObservableSet obs;
  bool converged = true;
};

// Solves every grid point on a pool of cfg.threads workers. Results come back
// in grid order; a failing point is rethrown naming its J/U.
std::vector<PointResult> solve_sweep(const SweepConfig& cfg);

struct Fig2Row {
  double j_over_u = 0.0;
  double e_exact = 0.0;   // per particle
  double g_estimate = 0.0;
  double d = 0.0;
  double band_low = 0.0;
  double band_high = 0.0;
};

struct Fig3Row {
  double j_over_u = 0.0;
  double abs_work_over_dj = 0.0;
};

std::vector<Fig2Row> fig2_rows(const SweepConfig& cfg, const optics::OverlapTable& ov,
                               const std::vector<PointResult>& points);
std::vector<Fig3Row> fig3_rows(const SweepConfig& cfg, const std::vector<PointResult>& points);

inline const std::vector<std::string> kFig2Columns = {"j_over_u", "e_exact",  "g_estimate",
                                                       "d",        "band_low", "band_high"};
inline const std::vector<std::string> kFig3Columns = {"j_over_u", "abs_work_over_dj"};

void write_fig2_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<Fig2Row>& rows);
void write_fig3_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<Fig3Row>& rows);

// Runs the sweep and writes <out>/fig2.csv + fig2.svg (or fig3.*). Returns the
// CSV path.
std::string run_fig2(const SweepConfig& cfg);
std::string run_fig3(const SweepConfig& cfg);

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;  // from "# key = value"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
  double residual = 0.0;  // RMS of log residuals
  int points_used = 0;
  int excluded_nonpositive = 0;
};

// Least squares of log d against log x over lo <= x <= hi. Points with d <= 0
// are dropped and counted. Throws std::invalid_argument with fewer than 4
// usable points.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points, double lo,
                        double hi);

// Transition marker drawn in the plots.
inline constexpr double kTransitionJOverU = 0.31;

// Static SVG renderings; both depend only on the table.
std::string fig2_svg(const CsvTable& table);
std::string fig3_svg(const CsvTable& table);

}  // namespace bhcav::experiments
