#include "bhcav/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bhcav/text_format.hpp"

namespace bhcav::experiments {

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw std::invalid_argument("log grid needs 0 < lo <= hi and count >= 1");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int k = 0; k < count; ++k) out[k] = std::exp(a + step * k);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_grid() { return log_grid(0.01, 0.6, 30); }

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("grid range must be lo:hi:count");
    const double count = parse_double(parts[2], "grid count");
    if (count != std::floor(count)) throw std::invalid_argument("grid count must be an integer");
    return log_grid(parse_double(parts[0], "grid lo"), parse_double(parts[1], "grid hi"),
                    static_cast<int>(count));
  }
  std::vector<double> out;
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(trim(p), "J/U"));
  return out;
}

void validate(const SweepConfig& cfg) {
  if (cfg.j_over_u.empty()) throw std::invalid_argument("empty J/U grid");
  for (std::size_t k = 0; k < cfg.j_over_u.size(); ++k) {
    if (!(cfg.j_over_u[k] >= 0.0)) throw std::invalid_argument("J/U values must be >= 0");
    if (k > 0 && !(cfg.j_over_u[k] > cfg.j_over_u[k - 1])) {
      throw std::invalid_argument("J/U values must be strictly increasing");
    }
  }
  const LatticeSpec spec = resolved({cfg.sites, cfg.particles, 0.0, cfg.interaction, cfg.n_max});
  if (cfg.backend == Backend::exact) {
    const auto dim = exact::basis_dimension(spec.sites, spec.particles, spec.n_max);
    if (dim > exact::kDefaultMaxDimension) {
      throw std::invalid_argument("exact backend: basis dimension " + std::to_string(dim) +
                                  " exceeds the limit; use --backend mps");
    }
  } else {
    mps::validate(cfg.dmrg);
  }
  if (!(cfg.n_error >= 0.0 && cfg.n_error < 1.0)) {
    throw std::invalid_argument("n_error must lie in [0, 1)");
  }
  if (!(cfg.dj > 0.0)) throw std::invalid_argument("dj must be > 0");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
  validate(cfg.cavity);
}

namespace {

std::string join_grid(const std::vector<double>& g) {
  std::string s;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k) s += ',';
    s += format_exact(g[k]);
  }
  return s;
}

int parse_int(const std::string& text, const std::string& what) {
  const double v = parse_double(text, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw std::invalid_argument(what + " must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_entries(const SweepConfig& cfg) {
  const auto& c = cfg.cavity;
  const auto& d = cfg.dmrg;
  return {
      {"m", std::to_string(cfg.sites)},
      {"n", std::to_string(cfg.particles)},
      {"u", format_exact(cfg.interaction)},
      {"n_max", std::to_string(cfg.n_max)},
      {"j_over_u", join_grid(cfg.j_over_u)},
      {"backend", to_string(cfg.backend)},
      {"chi_max", std::to_string(d.chi_max)},
      {"chi_start", std::to_string(d.chi_start)},
      {"max_sweeps", std::to_string(d.max_sweeps)},
      {"min_sweeps", std::to_string(d.min_sweeps)},
      {"energy_tol", format_exact(d.energy_tol)},
      {"truncation_tol", format_exact(d.truncation_tol)},
      {"n_error", format_exact(cfg.n_error)},
      {"n_error_applies_to", "chi1_subtraction,alpha,E0"},
      {"dj", format_exact(cfg.dj)},
      {"v0", format_exact(cfg.v0)},
      {"cutoff", std::to_string(cfg.plane_waves)},
      {"grid", std::to_string(cfg.grid_points)},
      {"overlaps", cfg.overlaps_path.empty() ? "computed" : cfg.overlaps_path},
      {"kappa", format_exact(c.kappa)},
      {"eta1", format_exact(c.eta1)},
      {"detuning_c1", format_exact(c.detuning_c1)},
      {"g1", format_exact(c.g1)},
      {"detuning_a1", format_exact(c.detuning_a1)},
      {"omega0", format_exact(c.omega0)},
      {"detuning_c2", format_exact(c.detuning_c2)},
      {"g2", format_exact(c.g2)},
      {"detuning_a2", format_exact(c.detuning_a2)},
  };
}

void apply_entries(SweepConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [key, value] : kv) {
    auto num = [&] { return parse_double(value, key); };
    auto integer = [&] { return parse_int(value, key); };
    if (key == "m") cfg.sites = integer();
    else if (key == "n") cfg.particles = integer();
    else if (key == "u") cfg.interaction = num();
    else if (key == "n_max") cfg.n_max = integer();
    else if (key == "j_over_u") cfg.j_over_u = parse_grid(value);
    else if (key == "backend") cfg.backend = parse_backend(value);
    else if (key == "chi_max") cfg.dmrg.chi_max = integer();
    else if (key == "chi_start") cfg.dmrg.chi_start = integer();
    else if (key == "max_sweeps") cfg.dmrg.max_sweeps = integer();
    else if (key == "min_sweeps") cfg.dmrg.min_sweeps = integer();
    else if (key == "energy_tol") cfg.dmrg.energy_tol = num();
    else if (key == "truncation_tol") cfg.dmrg.truncation_tol = num();
    else if (key == "n_error") cfg.n_error = num();
    else if (key == "n_error_applies_to") continue;
    else if (key == "dj") cfg.dj = num();
    else if (key == "threads") cfg.threads = integer();
    else if (key == "out") cfg.out_dir = value;
    else if (key == "checkpoint_dir") cfg.checkpoint_dir = value;
    else if (key == "v0") cfg.v0 = num();
    else if (key == "cutoff") cfg.plane_waves = integer();
    else if (key == "grid") cfg.grid_points = integer();
    else if (key == "overlaps") cfg.overlaps_path = value == "computed" ? "" : value;
    else if (key == "kappa") cfg.cavity.kappa = num();
    else if (key == "eta1") cfg.cavity.eta1 = num();
    else if (key == "detuning_c1") cfg.cavity.detuning_c1 = num();
    else if (key == "g1") cfg.cavity.g1 = num();
    else if (key == "detuning_a1") cfg.cavity.detuning_a1 = num();
    else if (key == "omega0") cfg.cavity.omega0 = num();
    else if (key == "detuning_c2") cfg.cavity.detuning_c2 = num();
    else if (key == "g2") cfg.cavity.g2 = num();
    else if (key == "detuning_a2") cfg.cavity.detuning_a2 = num();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

SweepConfig read_config_file(const std::string& path, SweepConfig base) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  apply_entries(base, parse_key_values(is));
  return base;
}

optics::OverlapTable load_overlaps(const SweepConfig& cfg) {
  if (!cfg.overlaps_path.empty()) return optics::read_overlap_table_file(cfg.overlaps_path);
  optics::LatticePotential pot;
  pot.depth = cfg.v0;
  pot.cutoff = cfg.plane_waves;
  return optics::compute_overlaps(pot, cfg.grid_points);
}

namespace {

PointResult solve_point(const SweepConfig& cfg, double j_over_u) {
  LatticeSpec spec{cfg.sites, cfg.particles, j_over_u * cfg.interaction, cfg.interaction,
                   cfg.n_max};
  SolveOptions opt;
  opt.backend = cfg.backend;
  opt.dmrg = cfg.dmrg;
  if (cfg.backend == Backend::mps && !cfg.checkpoint_dir.empty()) {
    std::filesystem::create_directories(cfg.checkpoint_dir);
    char name[96];
    std::snprintf(name, sizeof name, "mps_M%d_N%d_j%.10g.bin", cfg.sites, cfg.particles,
                  j_over_u);
    opt.dmrg.checkpoint_path = (std::filesystem::path(cfg.checkpoint_dir) / name).string();
  }
  const auto gs = solve_ground_state(spec, opt);
  PointResult r;
  r.j_over_u = j_over_u;
  r.spec = gs->spec();
  r.obs = gs->observables();
  r.converged = gs->converged();
  return r;
}

}  // namespace

std::vector<PointResult> solve_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const std::size_t n = cfg.j_over_u.size();
  std::vector<PointResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        results[k] = solve_point(cfg, cfg.j_over_u[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int nthreads = static_cast<int>(std::min<std::size_t>(cfg.threads, n));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw std::runtime_error("ground state failed at J/U = " + format_csv(cfg.j_over_u[k]) +
                               ": " + e.what());
    }
  }
  return results;
}

std::vector<Fig2Row> fig2_rows(const SweepConfig& cfg, const optics::OverlapTable& ov,
                               const std::vector<PointResult>& points) {
  EstimatorOptions eo;
  eo.n_error = cfg.n_error;
  std::vector<Fig2Row> rows;
  for (const auto& p : points) {
    const EstimatorReport rep = run_estimator(cfg.cavity, ov, p.spec, p.obs, eo);
    rows.push_back({p.j_over_u, rep.E_per_particle(), rep.G_per_particle(), rep.discrepancy,
                    rep.band_low_per_particle(), rep.band_high_per_particle()});
  }
  return rows;
}

std::vector<Fig3Row> fig3_rows(const SweepConfig& cfg, const std::vector<PointResult>& points) {
  std::vector<Fig3Row> rows;
  for (const auto& p : points) {
    const double w = quench_work(p.spec, p.obs, cfg.dj * cfg.interaction);
    rows.push_back({p.j_over_u, std::abs(w) / (cfg.dj * cfg.interaction)});
  }
  return rows;
}

namespace {

void write_metadata(std::ostream& os, const SweepConfig& cfg) {
  for (const auto& [k, v] : config_entries(cfg)) os << "# " << k << " = " << v << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace

void write_fig2_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<Fig2Row>& rows) {
  write_metadata(os, cfg);
  os << "# energies = per particle, units of U\n";
  write_header(os, kFig2Columns);
  for (const auto& r : rows) {
    os << format_csv(r.j_over_u) << ',' << format_csv(r.e_exact) << ','
       << format_csv(r.g_estimate) << ',' << format_csv(r.d) << ',' << format_csv(r.band_low)
       << ',' << format_csv(r.band_high) << '\n';
  }
}

void write_fig3_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<Fig3Row>& rows) {
  write_metadata(os, cfg);
  write_header(os, kFig3Columns);
  for (const auto& r : rows) {
    os << format_csv(r.j_over_u) << ',' << format_csv(r.abs_work_over_dj) << '\n';
  }
}

std::string run_fig2(const SweepConfig& cfg) {
  const optics::OverlapTable ov = load_overlaps(cfg);
  const auto rows = fig2_rows(cfg, ov, solve_sweep(cfg));
  std::filesystem::create_directories(cfg.out_dir);
  const auto dir = std::filesystem::path(cfg.out_dir);
  std::ostringstream csv;
  write_fig2_csv(csv, cfg, rows);
  write_file((dir / "fig2.csv").string(), csv.str());
  std::istringstream back(csv.str());
  write_file((dir / "fig2.svg").string(), fig2_svg(read_csv(back)));
  return (dir / "fig2.csv").string();
}

std::string run_fig3(const SweepConfig& cfg) {
  const auto rows = fig3_rows(cfg, solve_sweep(cfg));
  std::filesystem::create_directories(cfg.out_dir);
  const auto dir = std::filesystem::path(cfg.out_dir);
  std::ostringstream csv;
  write_fig3_csv(csv, cfg, rows);
  write_file((dir / "fig3.csv").string(), csv.str());
  std::istringstream back(csv.str());
  write_file((dir / "fig3.svg").string(), fig3_svg(read_csv(back)));
  return (dir / "fig3.csv").string();
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        t.metadata.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(trim(c));
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, "CSV field"));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw std::runtime_error("CSV has no header row");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_csv(is);
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points, double lo,
                        double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("fit range needs 0 < lo < hi");
  FitResult f;
  f.range_lo = lo;
  f.range_hi = hi;
  std::vector<double> xs, ys;
  for (const auto& [x, d] : points) {
    if (x < lo || x > hi) continue;
    if (!(d > 0.0)) {
      ++f.excluded_nonpositive;
      continue;
    }
    xs.push_back(std::log(x));
    ys.push_back(std::log(d));
  }
  f.points_used = static_cast<int>(xs.size());
  if (f.points_used < 4) {
    throw std::invalid_argument("power-law fit needs at least 4 points with d > 0 in [" +
                                format_csv(lo) + ", " + format_csv(hi) + "], got " +
                                std::to_string(f.points_used));
  }
  const Eigen::Index n = f.points_used;
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    A(k, 0) = 1.0;
    A(k, 1) = xs[k];
    b(k) = ys[k];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  f.prefactor = std::exp(coef(0));
  f.exponent = coef(1);
  f.residual = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(n));
  return f;
}

}  // namespace bhcav::experiments
