#include <doctest.h>

#include <cmath>
#include <random>

#include "bhcav/estimator.hpp"
#include "bhcav/ground_state.hpp"

using namespace bhcav;

namespace {

optics::OverlapTable synthetic_table() {
  optics::OverlapTable t;
  t.J_cl_hop = 0.02;
  t.U_int = 2.0;
  t.J11_onsite = 0.16;
  t.J11_hop = 0.0044;
  t.J20 = 0.9;
  return t;
}

ObservableSet exact_obs(const LatticeSpec& spec) {
  SolveOptions opt;
  opt.backend = Backend::exact;
  return solve_ground_state(spec, opt)->observables();
}

// Random symmetric correlation table with consistent P, N.
ObservableSet random_table(int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  ObservableSet obs;
  obs.density_corr.resize(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = i; j < M; ++j) obs.density_corr(i, j) = obs.density_corr(j, i) = u(rng);
  }
  obs.densities = Eigen::VectorXd::Ones(M);
  obs.P_mean = obs.density_corr.trace();
  obs.N_mean = M;
  obs.B_mean = u(rng) * M;
  return obs;
}

double same_parity_excess(const ObservableSet& obs, double n) {
  double s = 0.0;
  const auto M = obs.density_corr.rows();
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = i + 2; j < M; j += 2) s += obs.density_corr(i, j) - n * n;
  }
  return s;
}

}  // namespace

TEST_CASE("same-parity pair count") {
  for (int M = 2; M <= 11; ++M) {
    long long brute = 0;
    for (int i = 0; i < M; ++i) {
      for (int j = i + 1; j < M; ++j) brute += (i + j) % 2 == 0;
    }
    CHECK(same_parity_pairs(M) == brute);
    if (M % 2 == 0) CHECK(same_parity_pairs(M) == (M / 2) * (M / 2 - 1));
  }
}

TEST_CASE("cavity parameter checks") {
  CavityParams cav;
  CHECK(within_linear_regime(cav));
  cav.g1 = 3.0;
  CHECK_FALSE(within_linear_regime(cav));
  CHECK(coefficients(cav, synthetic_table(), {4, 4, 0.1, 1.0, 4}, 4).validity_warning);
  cav = {};
  cav.eta2 = 0.5;
  CHECK_THROWS_AS(validate(cav), std::invalid_argument);
  cav = {};
  cav.kappa = 0.0;
  CHECK_THROWS_AS(validate(cav), std::invalid_argument);
}

TEST_CASE("coefficients: dark cavity 1 and dark cavity 2") {
  CavityParams cav;
  cav.eta1 = 1;
  cav.kappa = 1;
  cav.detuning_c1 = 1;
  cav.g1 = 0;
  const LatticeSpec spec{4, 4, 0.1, 1.0, 4};
  const auto c = coefficients(cav, synthetic_table(), spec, 4);
  CHECK(c.chi0 == doctest::Approx(1.0));
  CHECK(c.chi1 == 0.0);
  CHECK(c.chi2 == 0.0);
  CHECK_FALSE(c.usable);
  CHECK_THROWS_AS(require_usable(c), std::invalid_argument);

  CavityParams dark;
  dark.omega0 = 0.0;
  const auto d = coefficients(dark, synthetic_table(), spec, 4);
  CHECK(std::abs(d.R) == 0.0);
  CHECK(d.xi == 0.0);
  CHECK_FALSE(d.usable);
  CHECK_THROWS_AS(estimate_energy(d, 0.0, 0.0, spec), std::invalid_argument);
}

TEST_CASE("coefficients in the default regime") {
  CavityParams cav;  // g1^2/da1 = 0.05 kappa, dc1 = 5 kappa
  const auto ov = default_overlaps();
  const LatticeSpec spec{40, 40, 0.05, 1.0, 4};
  const auto c = coefficients(cav, ov, spec, 40);
  CHECK(c.usable);
  CHECK_FALSE(c.validity_warning);
  const double lorentz = 1.0 + 25.0;
  CHECK(c.chi0 == doctest::Approx(2.0 * 5.0 / lorentz));
  CHECK(c.chi1 == doctest::Approx(-2.0 / 20.0 * ov.J11_onsite / lorentz));
  CHECK(c.chi2 == doctest::Approx(-2.0 / 20.0 * ov.J11_hop / lorentz));
  const std::complex<double> R = 1.0 / (20.0 * std::complex<double>(5.0, 1.0));
  CHECK(std::abs(std::complex<double>(c.R) - R) < 1e-15);
  CHECK(c.xi == doctest::Approx(2 * std::norm(R) * ov.J20 * ov.J20));
  for (double v : {c.chi0, c.chi1, c.chi2, c.xi, c.alpha, c.E0}) CHECK(std::isfinite(v));
}

TEST_CASE("quadrature readout and inversion") {
  const LatticeSpec spec{40, 40, 0.1, 1.0, 4};
  const auto c = coefficients({}, synthetic_table(), spec, 40);
  ObservableSet obs;
  obs.N_mean = 40;
  obs.B_mean = 0.0;
  CHECK(quad1_readout(c, obs) == c.chi0 + 40 * c.chi1);
  obs.B_mean = 17.25;
  const double q = quad1_readout(c, obs);
  CHECK(std::abs((q - c.chi0 - c.chi1 * 40) / c.chi2 - 17.25) < 1e-9);

  // Two sites, one particle, J = 1: <B> = 1.
  const LatticeSpec two{2, 1, 1.0, 1.0, 3};
  const auto c2 = coefficients({}, synthetic_table(), two, 1);
  const auto o2 = exact_obs(two);
  CHECK(quad1_readout(c2, o2) == doctest::Approx(c2.chi0 + c2.chi1 + c2.chi2).epsilon(1e-12));
}

TEST_CASE("photon readout at J = 0 is exactly the factorized form") {
  for (int M : {4, 6, 40}) {
    const LatticeSpec spec{M, M, 0.0, 1.0, 4};
    const auto c = coefficients({}, default_overlaps(), spec, M);
    ObservableSet obs;
    obs.density_corr = Eigen::MatrixXd::Ones(M, M);
    obs.P_mean = M;
    obs.N_mean = M;
    const auto ph = photon2_readout(c, obs);
    CHECK(ph.exact == 0.0);
    CHECK(std::abs(ph.approx) < 1e-14 * c.xi * M * M);
  }
}

TEST_CASE("photon readout for two sites, two particles") {
  // Ground state (a, b, a) of the 3x3 block at J = U = 1.
  const double E = (1 - std::sqrt(17.0)) / 2;
  const double ratio = (1 - E) / std::sqrt(2.0);
  const double a2 = 1.0 / (2.0 + ratio * ratio);
  const double staggered = 8.0 * a2;  // <(n0 - n1)^2>

  const LatticeSpec spec{2, 2, 1.0, 1.0, 3};
  const auto c = coefficients({}, synthetic_table(), spec, 2);
  SolveOptions opt;
  opt.backend = Backend::exact;
  const auto obs = solve_ground_state(spec, opt)->observables();
  const double brute = 0.5 * c.xi *
                       (obs.density_corr(0, 0) + obs.density_corr(1, 1) - 2 * obs.density_corr(0, 1));
  const auto ph = photon2_readout(c, obs);
  CHECK(ph.exact == doctest::Approx(0.5 * c.xi * staggered).epsilon(1e-10));
  CHECK(ph.exact == doctest::Approx(brute).epsilon(1e-12));
  CHECK(ph.exact >= 0.0);
}

TEST_CASE("nearest-neighbour correlations drop out at fixed N^2") {
  std::mt19937_64 rng(7);
  const LatticeSpec spec{8, 8, 0.1, 1.0, 4};
  const auto c = coefficients({}, synthetic_table(), spec, 8);
  const double s = 0.5 * c.xi;
  auto invariant = [&](const ObservableSet& o) {
    double same = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) same += (1 + ((i + j) % 2 == 0 ? 1 : -1)) * o.density_corr(i, j);
    }
    const double N2 = o.density_corr.sum();
    return photon2_readout(c, o).exact + s * N2 - 2 * s * same;
  };
  auto obs = random_table(8, rng);
  const double before = invariant(obs);
  const double photons_before = photon2_readout(c, obs).exact;
  for (int i = 0; i + 1 < 8; ++i) {
    obs.density_corr(i, i + 1) += 0.3 * (i + 1);
    obs.density_corr(i + 1, i) += 0.3 * (i + 1);
  }
  CHECK(invariant(obs) == doctest::Approx(before).epsilon(1e-13));
  CHECK(photon2_readout(c, obs).exact != doctest::Approx(photons_before));
}

TEST_CASE("exact photons differ from the factorized form only by the factorization error") {
  std::mt19937_64 rng(11);
  for (int M : {6, 7, 10}) {
    const LatticeSpec spec{M, M, 0.2, 1.0, 4};
    const auto obs = random_table(M, rng);
    const auto c = coefficients({}, synthetic_table(), spec, M);
    const auto ph = photon2_readout(c, obs);
    // The table's own N^2 replaces n_est^2 in the pair sum identity.
    const double N2 = obs.density_corr.sum();
    const double n = 1.0;
    const double expected =
        0.5 * c.xi * (4 * same_parity_excess(obs, n) - N2 + static_cast<double>(M) * M);
    CHECK(ph.exact - ph.approx == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("estimate is exact at J = 0, unit filling") {
  for (int M : {6, 40}) {
    const LatticeSpec spec = resolved({M, M, 0.0, 1.0});
    ObservableSet obs;
    obs.density_corr = Eigen::MatrixXd::Ones(M, M);
    obs.densities = Eigen::VectorXd::Ones(M);
    obs.P_mean = M;
    obs.N_mean = M;
    obs.energy = 0.0;
    const auto rep = run_estimator({}, default_overlaps(), spec, obs);
    CHECK(std::abs(rep.G_estimate - rep.E_exact) <= 1e-10);
    CHECK(rep.band_low <= rep.G_estimate);
    CHECK(rep.band_high >= rep.G_estimate);
  }
}

TEST_CASE("M = 6 discrepancy equals the same-parity correlation excess") {
  const LatticeSpec spec{6, 6, 0.1, 1.0};
  const auto obs = exact_obs(spec);
  const auto rep = run_estimator({}, default_overlaps(), resolved(spec), obs);
  const double excess = same_parity_excess(obs, 1.0);
  CHECK(rep.G_estimate - rep.E_exact == doctest::Approx(excess).epsilon(1e-9));
  CHECK(rep.discrepancy == doctest::Approx(std::abs(excess) / 6).epsilon(1e-9));

  EstimatorOptions approx;
  approx.exact_photons = false;
  const auto rep2 = run_estimator({}, default_overlaps(), resolved(spec), obs, approx);
  // With the factorized photon form the estimator reproduces -J B + (U/2)(P - N).
  CHECK(std::abs(rep2.G_estimate - rep2.E_exact) < 1e-10);
}

TEST_CASE("band brackets the estimate and collapses without error") {
  const LatticeSpec spec{6, 6, 0.2, 1.0};
  const auto obs = exact_obs(spec);
  const auto rep = run_estimator({}, default_overlaps(), resolved(spec), obs);
  CHECK(rep.band_low < rep.G_estimate);
  CHECK(rep.band_high > rep.G_estimate);
  EstimatorOptions none;
  none.n_error = 0.0;
  const auto flat = run_estimator({}, default_overlaps(), resolved(spec), obs, none);
  CHECK(flat.band_low == flat.G_estimate);
  CHECK(flat.band_high == flat.G_estimate);
}

TEST_CASE("pump strength drops out of the estimate") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  const LatticeSpec spec{6, 6, 0.15, 1.0};
  const auto obs = exact_obs(spec);
  const auto base = run_estimator({}, default_overlaps(), resolved(spec), obs);
  for (int t = 0; t < 20; ++t) {
    CavityParams cav;
    cav.eta1 = factor(rng);
    const auto rep = run_estimator(cav, default_overlaps(), resolved(spec), obs);
    CHECK(std::abs(rep.G_estimate - base.G_estimate) < 1e-12);
  }
}

TEST_CASE("estimator rejects incomplete inputs") {
  const LatticeSpec spec{4, 4, 0.1, 1.0, 4};
  ObservableSet empty;
  CHECK_THROWS_AS(run_estimator({}, synthetic_table(), spec, empty), std::invalid_argument);
  const auto c = coefficients({}, synthetic_table(), spec, 4);
  CHECK_THROWS_AS(photon2_readout(c, empty), std::invalid_argument);
  CHECK_THROWS_AS(coefficients({}, synthetic_table(), spec, 0.0), std::invalid_argument);
}
