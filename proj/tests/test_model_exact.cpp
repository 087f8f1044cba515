#include <doctest.h>

#include <cmath>
#include <random>

#include "bhcav/exact_solver.hpp"
#include "bhcav/ground_state.hpp"

using namespace bhcav;

namespace {

double ground_energy(LatticeSpec spec) {
  spec = resolved(spec);
  const exact::FockBasis basis(spec.sites, spec.particles, spec.n_max);
  return exact::ground_state(exact::build_hamiltonian(spec, basis)).energy;
}

ObservableSet solve_exact(const LatticeSpec& spec) {
  SolveOptions opt;
  opt.backend = Backend::exact;
  return solve_ground_state(spec, opt)->observables();
}

}  // namespace

TEST_CASE("lattice spec validation") {
  CHECK_THROWS_AS(resolved({1, 1, 0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(resolved({4, 0, 0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(resolved({4, 4, -0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(resolved({4, 4, 0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(resolved({4, 4, 0.1, 1.0, 2}), std::invalid_argument);
  CHECK(resolved({4, 4, 0.1, 1.0}).n_max == 4);
  CHECK(resolved({4, 6, 0.1, 1.0}).n_max == 5);
}

TEST_CASE("energy from parts") {
  ObservableSet obs;
  obs.density_corr = Eigen::MatrixXd::Ones(4, 4);
  obs.P_mean = 4;
  CHECK(energy_from_parts({4, 4, 0.0, 1.0, 4}, obs) == 0.0);

  ObservableSet two;
  two.density_corr = Eigen::MatrixXd::Zero(2, 2);
  two.B_mean = 1;
  two.P_mean = 1;
  CHECK(energy_from_parts({2, 1, 1.0, 1.0, 3}, two) == doctest::Approx(-1.0));
  CHECK(quench_work({2, 1, 1.0, 1.0, 3}, two, 0.1) == doctest::Approx(-0.1));
  two.B_mean = 0;
  CHECK(quench_work({2, 1, 1.0, 1.0, 3}, two, 0.3) == 0.0);

  CHECK_THROWS_AS(energy_from_parts({3, 3, 0.0, 1.0, 4}, two), std::invalid_argument);
}

TEST_CASE("basis dimension and ordering") {
  CHECK(exact::basis_dimension(6, 6, 6) == 462);
  const exact::FockBasis b(6, 6, 6);
  CHECK(b.size() == 462);
  for (std::size_t k = 1; k < b.size(); ++k) {
    const auto a = b.state(k - 1);
    const auto c = b.state(k);
    CHECK(std::lexicographical_compare(a.begin(), a.end(), c.begin(), c.end()));
  }
  // A cutoff removes states.
  CHECK(exact::basis_dimension(6, 6, 2) < 462);
  CHECK_THROWS_AS(exact::FockBasis(20, 20, 20, 1000), std::length_error);
}

TEST_CASE("basis lookup round trip on random indices") {
  const exact::FockBasis b(9, 9, 4);
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = pick(rng);
    CHECK(b.index_of(b.state(k)) == k);
  }
  const std::vector<std::uint8_t> outside = {9, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(b.index_of(outside), std::out_of_range);
}

TEST_CASE("two-site, two-particle Hamiltonian") {
  const LatticeSpec spec{2, 2, 1.0, 1.0, 3};
  const exact::FockBasis b(2, 2, 3);
  const Eigen::MatrixXd H = exact::build_hamiltonian(spec, b);
  const double r = std::sqrt(2.0);
  Eigen::Matrix3d ref;
  // basis order (0,2), (1,1), (2,0)
  ref << 1, -r, 0, -r, 0, -r, 0, -r, 1;
  CHECK((H - ref).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(ground_energy(spec) == doctest::Approx((1 - std::sqrt(17.0)) / 2).epsilon(1e-12));
}

TEST_CASE("diagonal Hamiltonian at J = 0 and Fock ground state") {
  const LatticeSpec spec = resolved({5, 5, 0.0, 1.0});
  const exact::FockBasis b(5, 5, spec.n_max);
  const auto H = exact::build_hamiltonian(spec, b);
  for (int k = 0; k < H.outerSize(); ++k) {
    for (exact::SparseMatrix::InnerIterator it(H, k); it; ++it) CHECK(it.row() == it.col());
  }
  const auto obs = solve_exact(spec);
  CHECK(std::abs(obs.energy) < 1e-12);
  CHECK((obs.density_corr - Eigen::MatrixXd::Ones(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("single particle on two sites") {
  const LatticeSpec spec{2, 1, 1.0, 1.0, 3};
  const exact::FockBasis b(2, 1, 3);
  const auto gs = exact::ground_state(exact::build_hamiltonian(spec, b));
  CHECK(gs.energy == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(std::abs(gs.vector(0)) - 1 / std::sqrt(2.0)) < 1e-10);
  CHECK(gs.vector(0) * gs.vector(1) > 0);
  const auto obs = exact::measure(gs.vector, b, spec);
  CHECK(obs.B_mean == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("observable invariants and energy decomposition") {
  for (double j : {0.05, 0.2, 0.5}) {
    const LatticeSpec spec{6, 6, j, 1.0};
    const auto obs = solve_exact(spec);
    CHECK(std::abs(obs.N_mean - 6) < 1e-8);
    CHECK(std::abs(obs.P_mean - obs.density_corr.trace()) < 1e-12);
    CHECK((obs.density_corr - obs.density_corr.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(obs.P_mean >= 6.0 * 6.0 / 6.0 - 1e-12);
    CHECK(std::abs(energy_from_parts(spec, obs) - obs.energy) < 1e-10);
    // Variational bound against the unit-filling Fock state (energy 0).
    CHECK(obs.energy <= 0.0);
  }
}

TEST_CASE("Hellmann-Feynman: dE/dJ = -<B>") {
  const double delta = 1e-4;
  for (auto [M, N, j] : {std::tuple{6, 6, 0.1}, std::tuple{5, 7, 0.25}, std::tuple{4, 4, 0.6}}) {
    LatticeSpec spec{M, N, j, 1.0};
    spec = resolved(spec);
    spec.n_max = N;  // no cutoff, so the three solves share one Hilbert space
    const auto obs = solve_exact(spec);
    LatticeSpec lo = spec, hi = spec;
    lo.tunneling -= delta;
    hi.tunneling += delta;
    const double slope = (ground_energy(hi) - ground_energy(lo)) / (2 * delta);
    CHECK(std::abs(-slope - obs.B_mean) <= 1e-4 * obs.B_mean);
  }
}

TEST_CASE("cutoff is raised while the top level is populated") {
  LatticeSpec spec{6, 6, 0.8, 1.0, 3};
  SolveOptions opt;
  const auto gs = solve_ground_state(spec, opt);
  CHECK(gs->spec().n_max > 3);
  CHECK((gs->observables().cutoff_weight <= 1e-10 || gs->spec().n_max == 6));
  opt.auto_raise_cutoff = false;
  CHECK(solve_ground_state(spec, opt)->spec().n_max == 3);
}

TEST_CASE("degeneracy flag") {
  // One particle on two sites at J = 0: two degenerate states.
  const LatticeSpec flat{2, 1, 0.0, 1.0, 3};
  const exact::FockBasis b(2, 1, 3);
  CHECK(exact::ground_state(exact::build_hamiltonian(flat, b)).degenerate);
  const LatticeSpec split{2, 1, 0.5, 1.0, 3};
  const auto gs = exact::ground_state(exact::build_hamiltonian(split, b));
  CHECK_FALSE(gs.degenerate);
  CHECK(gs.gap == doctest::Approx(1.0).epsilon(1e-8));
}
