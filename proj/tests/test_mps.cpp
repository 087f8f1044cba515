#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bhcav/dmrg.hpp"
#include "bhcav/ground_state.hpp"

using namespace bhcav;

namespace {

ObservableSet exact_obs(const LatticeSpec& spec) {
  SolveOptions opt;
  opt.backend = Backend::exact;
  opt.auto_raise_cutoff = false;
  return solve_ground_state(spec, opt)->observables();
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config validation") {
  mps::DmrgConfig cfg;
  cfg.chi_max = 8;
  CHECK_THROWS_AS(mps::validate(cfg), std::invalid_argument);
  cfg.chi_max = 16;
  cfg.energy_tol = 0.0;
  CHECK_THROWS_AS(mps::validate(cfg), std::invalid_argument);
  CHECK(mps::default_chi_max(40) == 128);
  CHECK(mps::default_chi_max(80) == 160);
}

TEST_CASE("product state at J = 0") {
  const LatticeSpec spec = resolved({8, 8, 0.0, 1.0});
  const auto psi = mps::dmrg_ground_state(spec, {});
  CHECK(psi.converged);
  CHECK(std::abs(psi.energy) < 1e-14);
  CHECK(psi.max_bond_dimension() == 1);
  const auto obs = mps::measure_mps(psi, spec);
  CHECK((obs.density_corr - Eigen::MatrixXd::Ones(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(obs.B_mean == 0.0);
}

TEST_CASE("product state correlations are products of occupations") {
  const std::vector<int> occ = {2, 0, 1, 3, 0, 1};
  const auto psi = mps::product_state(occ, 5);
  const auto obs = mps::measure_mps(psi, {6, 7, 0.0, 1.0, 5});
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(obs.density_corr(i, j) == doctest::Approx(static_cast<double>(occ[i] * occ[j])));
    }
  }
  CHECK(std::abs(mps::norm_squared(psi) - 1.0) < 1e-15);
}

TEST_CASE("M = 6 matches exact diagonalization") {
  const LatticeSpec spec = resolved({6, 6, 0.1, 1.0});
  const auto psi = mps::dmrg_ground_state(spec, {});
  CHECK(psi.converged);
  const auto ref = exact_obs(spec);
  const auto obs = mps::measure_mps(psi, spec);
  CHECK(std::abs(psi.energy - ref.energy) / 6 < 1e-8);
  CHECK(std::abs(obs.B_mean - ref.B_mean) < 1e-6);
  CHECK((obs.density_corr - ref.density_corr).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(psi.energy >= ref.energy - 1e-10);
  CHECK(std::abs(energy_from_parts(spec, obs) - psi.energy) / 6 < 1e-8);
  CHECK(std::abs(obs.N_mean - 6) < 1e-8);
}

TEST_CASE("canonical form, norm and bond cap") {
  const LatticeSpec spec = resolved({12, 12, 0.4, 1.0});
  mps::DmrgConfig cfg;
  cfg.chi_max = 16;
  cfg.chi_start = 16;
  const auto psi = mps::dmrg_ground_state(spec, cfg);
  CHECK(psi.center == 0);
  CHECK(std::abs(mps::norm_squared(psi) - 1.0) < 1e-10);
  for (int i = 1; i < psi.sites; ++i) CHECK(mps::right_canonical_error(psi, i) < 1e-10);
  CHECK(psi.max_bond_dimension() <= 16);
}

TEST_CASE("sweep energies do not increase") {
  const LatticeSpec spec = resolved({16, 16, 0.3, 1.0});
  mps::DmrgConfig cfg;
  cfg.chi_max = 64;
  cfg.min_sweeps = 6;
  const auto psi = mps::dmrg_ground_state(spec, cfg);
  REQUIRE(psi.log.size() >= 2);
  for (std::size_t k = 1; k < psi.log.size(); ++k) {
    CHECK(psi.log[k].energy <= psi.log[k - 1].energy + 1e-12);
  }
}

TEST_CASE("sweep limit returns a flagged state") {
  const LatticeSpec spec = resolved({10, 10, 0.3, 1.0});
  mps::DmrgConfig cfg;
  cfg.max_sweeps = 1;
  const auto psi = mps::dmrg_ground_state(spec, cfg);
  CHECK_FALSE(psi.converged);
  CHECK(psi.log.size() == 1);
}

TEST_CASE("non-unit filling") {
  const LatticeSpec spec = resolved({6, 9, 0.15, 1.0});
  const auto psi = mps::dmrg_ground_state(spec, {});
  const auto ref = exact_obs(spec);
  CHECK(std::abs(psi.energy - ref.energy) / 6 < 1e-8);
  CHECK(std::abs(mps::measure_mps(psi, spec).B_mean - ref.B_mean) < 1e-6);
}

TEST_CASE("checkpoint round trip and resume") {
  const LatticeSpec spec = resolved({10, 10, 0.2, 1.0});
  const std::string path = temp_path("bhcav_test_checkpoint.bin");
  mps::DmrgConfig cfg;
  cfg.checkpoint_path = path;
  const auto psi = mps::dmrg_ground_state(spec, cfg);
  const auto back = mps::load_checkpoint(path);
  CHECK(back.sites == psi.sites);
  CHECK(back.n_max == psi.n_max);
  CHECK(back.center == psi.center);
  CHECK(back.energy == psi.energy);
  CHECK(back.log.size() == psi.log.size());
  REQUIRE(back.tensors.size() == psi.tensors.size());
  for (std::size_t i = 0; i < psi.tensors.size(); ++i) {
    REQUIRE(back.tensors[i].blocks.size() == psi.tensors[i].blocks.size());
    for (std::size_t k = 0; k < psi.tensors[i].blocks.size(); ++k) {
      CHECK(back.tensors[i].blocks[k] == psi.tensors[i].blocks[k]);
    }
  }

  // Resuming from the converged state with a larger cutoff converges at once.
  LatticeSpec wider = spec;
  wider.n_max += 1;
  mps::DmrgConfig resume;
  const auto again = mps::dmrg_ground_state(wider, resume, back);
  const auto fresh = mps::dmrg_ground_state(wider, resume);
  CHECK(again.converged);
  CHECK(again.log.size() <= back.log.size() + 3);
  CHECK(std::abs(again.energy - fresh.energy) < 1e-9);
  CHECK(again.energy <= psi.energy + 1e-12);

  {
    std::ofstream bad(path, std::ios::binary);
    bad << "not a checkpoint";
  }
  CHECK_THROWS_AS(mps::load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(mps::load_checkpoint(path), std::runtime_error);
}

TEST_CASE("checkpoint version is checked") {
  const std::string path = temp_path("bhcav_test_version.bin");
  mps::save_checkpoint(mps::uniform_product_state(4, 4, 3), path);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(8);
    const std::uint32_t future = 99;
    f.write(reinterpret_cast<const char*>(&future), sizeof future);
  }
  CHECK_THROWS_WITH_AS(mps::load_checkpoint(path), doctest::Contains("version"),
                       std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("mismatched initial state is rejected") {
  const LatticeSpec spec = resolved({6, 6, 0.2, 1.0});
  CHECK_THROWS_AS(mps::dmrg_ground_state(spec, {}, mps::uniform_product_state(5, 5, 4)),
                  std::invalid_argument);
}
