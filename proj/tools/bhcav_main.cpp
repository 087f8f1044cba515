// bhcav: ground-state sweeps, cavity energy estimates and overlap tables.
//
//   bhcav overlaps --v0 10 --out overlaps.txt
//   bhcav fig2 --m 40 --n 40 --j-over-u 0.01:0.6:30 --out results
//   bhcav fig3 --m 80 --n 80 --j-over-u 0.01,0.1,0.31 --out results
//   bhcav fit results/fig2.csv --lo 0.02 --hi 0.1

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bhcav/experiments.hpp"
#include "bhcav/lattice_optics.hpp"
#include "bhcav/text_format.hpp"

namespace {

using namespace bhcav;
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Sweep flags; unset flags leave the config-file value alone.
struct SweepFlags {
  std::string config;
  std::optional<int> m, n, chi_max, threads, cutoff, grid;
  std::optional<std::string> j_over_u, backend, out, overlaps, checkpoint_dir;
  std::optional<double> n_error, dj, v0;

  void attach(CLI::App* app, bool with_dj) {
    app->add_option("--config", config, "flat key = value run configuration")
        ->check(CLI::ExistingFile);
    app->add_option("--m", m, "number of sites");
    app->add_option("--n", n, "number of particles");
    app->add_option("--j-over-u", j_over_u, "J/U list a,b,c or log range lo:hi:count");
    app->add_option("--backend", backend, "exact or mps");
    app->add_option("--chi-max", chi_max, "maximum MPS bond dimension");
    app->add_option("--n-error", n_error, "relative error on the particle-number estimate");
    app->add_option("--out", out, "output directory");
    app->add_option("--threads", threads, "worker threads for independent J/U points");
    app->add_option("--overlaps", overlaps, "overlap table file (default: computed)");
    app->add_option("--v0", v0, "lattice depth in recoil energies");
    app->add_option("--cutoff", cutoff, "plane-wave cutoff");
    app->add_option("--grid", grid, "quadrature grid points");
    app->add_option("--checkpoint-dir", checkpoint_dir, "directory for MPS checkpoints");
    if (with_dj) app->add_option("--dj", dj, "quench step dJ in units of U");
  }

  experiments::SweepConfig resolve() const {
    KeyValues kv;
    if (!config.empty()) {
      std::ifstream is(config);
      kv = parse_key_values(is);
    }
    auto put = [&](const char* key, const auto& opt) {
      if (!opt) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) {
        kv.emplace_back(key, *opt);
      } else if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, double>) {
        kv.emplace_back(key, format_exact(*opt));
      } else {
        kv.emplace_back(key, std::to_string(*opt));
      }
    };
    put("m", m);
    put("n", n);
    put("j_over_u", j_over_u);
    put("backend", backend);
    put("chi_max", chi_max);
    put("n_error", n_error);
    put("out", out);
    put("threads", threads);
    put("overlaps", overlaps);
    put("v0", v0);
    put("cutoff", cutoff);
    put("grid", grid);
    put("checkpoint_dir", checkpoint_dir);
    put("dj", dj);
    experiments::SweepConfig cfg;
    experiments::apply_entries(cfg, kv);
    // Large chains get the larger bond dimension unless one was chosen.
    const bool chi_given =
        std::any_of(kv.begin(), kv.end(), [](const auto& p) { return p.first == "chi_max"; });
    if (!chi_given) cfg.dmrg.chi_max = mps::default_chi_max(cfg.sites);
    return cfg;
  }
};

int fail(const std::string& stage, const std::exception& e) {
  std::cerr << "bhcav " << stage << ": " << e.what() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity readout of Bose-Hubbard ground-state energies"};
  app.require_subcommand(1);

  SweepFlags fig2_flags, fig3_flags;
  auto* fig2 = app.add_subcommand("fig2", "exact vs. estimated energy and discrepancy sweep");
  fig2_flags.attach(fig2, false);
  auto* fig3 = app.add_subcommand("fig3", "quench work |W|/dJ = <B> sweep");
  fig3_flags.attach(fig3, true);

  std::string fit_csv, fit_x = "j_over_u", fit_y = "d";
  double fit_lo = 0.02, fit_hi = 0.1;
  auto* fit = app.add_subcommand("fit", "power-law fit of a CSV column");
  fit->add_option("csv", fit_csv, "CSV produced by fig2")->required()->check(CLI::ExistingFile);
  fit->add_option("--lo", fit_lo, "lower end of the fit range");
  fit->add_option("--hi", fit_hi, "upper end of the fit range");
  fit->add_option("--x", fit_x, "abscissa column");
  fit->add_option("--y", fit_y, "ordinate column");

  optics::LatticePotential pot;
  int ov_grid = 2048;
  std::string ov_out = "-";
  auto* ov = app.add_subcommand("overlaps", "Wannier overlap table for a sinusoidal lattice");
  ov->add_option("--v0", pot.depth, "lattice depth in recoil energies");
  ov->add_option("--cutoff", pot.cutoff, "plane-wave cutoff");
  ov->add_option("--grid", ov_grid, "quadrature grid points over 8 cells");
  ov->add_option("--out", ov_out, "output file, - for stdout");

  CLI11_PARSE(app, argc, argv);

  for (auto [cmd, flags] : {std::pair{fig2, &fig2_flags}, std::pair{fig3, &fig3_flags}}) {
    if (!cmd->parsed()) continue;
    const std::string name = cmd->get_name();
    experiments::SweepConfig cfg;
    try {
      cfg = flags->resolve();
      experiments::validate(cfg);
    } catch (const std::exception& e) {
      return fail(name + " (config)", e);
    }
    try {
      const std::string path =
          name == "fig2" ? experiments::run_fig2(cfg) : experiments::run_fig3(cfg);
      std::cout << path << '\n';
    } catch (const std::exception& e) {
      return fail(name + " (sweep)", e);
    }
    return 0;
  }

  if (fit->parsed()) {
    try {
      const auto table = experiments::read_csv_file(fit_csv);
      const auto cx = table.column(fit_x);
      const auto cy = table.column(fit_y);
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : table.rows) pts.emplace_back(r[cx], r[cy]);
      const auto f = experiments::fit_power_law(pts, fit_lo, fit_hi);
      std::cout << "exponent = " << format_csv(f.exponent) << '\n'
                << "prefactor = " << format_csv(f.prefactor) << '\n'
                << "range = " << format_csv(f.range_lo) << ' ' << format_csv(f.range_hi) << '\n'
                << "points = " << f.points_used << '\n'
                << "excluded_nonpositive = " << f.excluded_nonpositive << '\n'
                << "residual = " << format_csv(f.residual) << '\n';
    } catch (const std::exception& e) {
      return fail("fit", e);
    }
    return 0;
  }

  if (ov->parsed()) {
    try {
      const auto table = optics::compute_overlaps(pot, ov_grid);
      if (ov_out == "-") {
        optics::write_overlap_table(std::cout, table);
      } else {
        std::ofstream os(ov_out);
        if (!os) throw std::runtime_error("cannot write " + ov_out);
        optics::write_overlap_table(os, table);
      }
    } catch (const std::exception& e) {
      return fail("overlaps", e);
    }
    return 0;
  }
  return 0;
}
