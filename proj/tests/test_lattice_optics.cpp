#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bhcav/lattice_optics.hpp"

using namespace bhcav::optics;

namespace {

// Lowest-band width b1(q) - a0(q), q = V0/4, from Mathieu characteristic
// values (scipy.special.mathieu_a / mathieu_b).
struct MathieuWidth {
  double depth;
  double width;
};
constexpr MathieuWidth kMathieu[] = {
    {5.0, 0.2642112552301299},
    {10.0, 0.07674683621294065},
    {15.0, 0.026075751896555754},
};

LatticePotential lattice(double v0) {
  LatticePotential p;
  p.depth = v0;
  return p;
}

}  // namespace

TEST_CASE("cutoff below 8 is rejected") {
  LatticePotential p;
  p.cutoff = 7;
  CHECK_THROWS_AS(solve_bands(p), std::invalid_argument);
}

TEST_CASE("free particle band is the folded parabola") {
  const auto bands = solve_bands(lattice(0.0));
  for (int k = 0; k < bands.cells(); ++k) {
    const double q = bands.quasi_momenta[k];
    CHECK(bands.energies(k, 0) == doctest::Approx(q * q).epsilon(1e-12));
  }
}

TEST_CASE("band energies are even in the quasi-momentum") {
  for (double v0 : {0.0, 3.0, 10.0, 22.0}) {
    const auto bands = solve_bands(lattice(v0));
    const int L = bands.cells();
    for (int k = 1; k < L; ++k) {
      CHECK(std::abs(bands.quasi_momenta[k] + bands.quasi_momenta[L - k]) < 1e-14);
      for (int b = 0; b < 4; ++b) {
        CHECK(std::abs(bands.energies(k, b) - bands.energies(L - k, b)) < 1e-10);
      }
    }
  }
}

TEST_CASE("lowest bandwidth matches Mathieu characteristic values") {
  for (const auto& m : kMathieu) {
    const auto bands = solve_bands(lattice(m.depth));
    CHECK(bands.lowest_band_width() == doctest::Approx(m.width).epsilon(1e-9));
  }
  CHECK(solve_bands(lattice(10.0)).lowest_band_width() < 0.1);
}

TEST_CASE("gap closure refuses a Wannier function") {
  CHECK_THROWS_AS(build_wannier(solve_bands(lattice(0.0))), std::runtime_error);
}

TEST_CASE("Wannier function is normalized, even, orthogonal and localized") {
  const auto w = build_wannier(solve_bands(lattice(10.0)));
  const auto& s = w.samples();
  double norm = 0.0, peak = 0.0;
  std::size_t center = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    norm += s[k] * s[k] * w.step();
    if (std::abs(w.position(k)) < 0.5 * w.step()) center = k;
    peak = std::max(peak, std::abs(s[k]));
  }
  CHECK(std::abs(norm - 1.0) < 1e-8);
  CHECK(s[center] > 0.0);
  CHECK(s[center] == doctest::Approx(peak));
  for (std::size_t k = 1; k < s.size() / 2; ++k) {
    CHECK(std::abs(s[center + k] - s[center - k]) < 1e-6);
  }
  for (int j = 1; j <= 3; ++j) {
    CHECK(std::abs(mode_overlap(w, Mode::uniform, Mode::uniform, 0, j)) < 1e-6);
  }
  CHECK(mode_overlap(w, Mode::uniform, Mode::uniform, 2, 2) == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::abs(std::abs(w.position(k)) - 2.0) < 0.5 * w.step()) {
      CHECK(std::abs(s[k]) < 1e-2 * peak);
    }
  }
}

TEST_CASE("classical hopping is bandwidth over four") {
  const auto pot = lattice(10.0);
  const auto bands = solve_bands(pot);
  const auto table = compute_overlaps(pot);
  CHECK(table.J_cl_hop > 0.0);
  CHECK(std::abs(table.J_cl_hop / (bands.lowest_band_width() / 4.0) - 1.0) < 0.01);
}

TEST_CASE("hopping is positive across the lattice-depth range") {
  for (double v0 : {2.0, 5.0, 15.0, 29.0}) {
    CHECK(compute_overlaps(lattice(v0)).J_cl_hop > 0.0);
  }
}

TEST_CASE("mode-2 overlaps: zero between neighbours, alternating on site") {
  for (double v0 : {5.0, 10.0, 15.0}) {
    const auto w = build_wannier(solve_bands(lattice(v0)));
    for (int i = -2; i <= 2; ++i) {
      CHECK(std::abs(mode_overlap(w, Mode::cosine, Mode::uniform, i, i + 1)) < 1e-10);
      const double a = mode_overlap(w, Mode::cosine, Mode::uniform, i, i);
      const double b = mode_overlap(w, Mode::cosine, Mode::uniform, i + 1, i + 1);
      CHECK(std::abs(a + b) < 1e-10);
      CHECK(std::abs(a) > 0.5);
    }
  }
}

TEST_CASE("mode-1 overlaps do not depend on the site") {
  const auto w = build_wannier(solve_bands(lattice(10.0)));
  const double on = mode_overlap(w, Mode::sine, Mode::sine, 0, 0);
  const double hop = mode_overlap(w, Mode::sine, Mode::sine, 0, 1);
  for (int i = -3; i <= 3; ++i) {
    CHECK(std::abs(mode_overlap(w, Mode::sine, Mode::sine, i, i) - on) < 1e-12);
    CHECK(std::abs(mode_overlap(w, Mode::sine, Mode::sine, i, i + 1) - hop) < 1e-12);
  }
  // Sine and cosine modes do not mix on the same site or between neighbours.
  CHECK(std::abs(mode_overlap(w, Mode::sine, Mode::cosine, 0, 0)) < 1e-10);
  CHECK(std::abs(mode_overlap(w, Mode::sine, Mode::cosine, 0, 1)) < 1e-10);
}

TEST_CASE("halving the grid step leaves every entry within 1e-6") {
  for (double v0 : {5.0, 10.0, 15.0}) {
    const auto coarse = compute_overlaps(lattice(v0), 2048).entries();
    const auto fine = compute_overlaps(lattice(v0), 4096).entries();
    for (const auto& [name, value] : coarse) {
      if (name == "J20_hop") continue;  // zero
      CHECK_MESSAGE(std::abs(fine.at(name) - value) <= 1e-6 * std::abs(value), name);
    }
  }
}

TEST_CASE("too coarse a grid is diagnosed") {
  CHECK_THROWS_AS(compute_overlaps(lattice(10.0), 64), std::runtime_error);
}

TEST_CASE("overlap table file round trip") {
  const auto table = compute_overlaps(lattice(12.0));
  std::stringstream ss;
  write_overlap_table(ss, table);
  const auto back = read_overlap_table(ss);
  CHECK(back.entries() == table.entries());

  std::istringstream missing("J11_hop = 1\n");
  CHECK_THROWS(read_overlap_table(missing));
}
