#pragma once

#include <Eigen/Dense>

namespace bhcav {

// One-dimensional Bose-Hubbard chain with open boundaries:
//   H = -J sum_i (b_i^+ b_{i+1} + h.c.) + (U/2) sum_i n_i (n_i - 1).
struct LatticeSpec {
  int sites = 2;          // M
  int particles = 1;      // N
  double tunneling = 0.0; // J
  double interaction = 1.0; // U
  int n_max = 0;          // local occupation cutoff; 0 selects the default

  double filling() const { return static_cast<double>(particles) / sites; }
};

// ceil(N/M) + 3.
int default_cutoff(int sites, int particles);

// Fills in the default cutoff and checks M >= 2, N >= 1, J >= 0, U > 0 and
// n_max >= ceil(N/M) + 2. Throws std::invalid_argument.
LatticeSpec resolved(LatticeSpec spec);
void validate(const LatticeSpec& spec);

// Ground-state expectation values of the operators in
//   H = -J B + (U/2) P - (U/2) N.
struct ObservableSet {
  double energy = 0.0;
  double B_mean = 0.0;  // <sum_i b_i^+ b_{i+1} + h.c.>
  double P_mean = 0.0;  // <sum_i n_i^2>
  double N_mean = 0.0;  // <sum_i n_i>
  Eigen::VectorXd densities;     // <n_i>
  Eigen::MatrixXd density_corr;  // <n_i n_j>, M x M
  // Largest single-site probability of the cutoff occupation n_max.
  double cutoff_weight = 0.0;
  // Same for the level just below the cutoff; the ratio of the two tells how
  // far the cutoff has to move.
  double below_cutoff_weight = 0.0;

  int sites() const { return static_cast<int>(density_corr.rows()); }
};

// -J B + (U/2) P - (U/2) N. Throws std::invalid_argument on a size mismatch.
double energy_from_parts(const LatticeSpec& spec, const ObservableSet& obs);

// Mean work of the sudden quench J -> J + dJ from the state behind `obs`.
double quench_work(const LatticeSpec& spec, const ObservableSet& obs, double dJ);

void check_consistent(const LatticeSpec& spec, const ObservableSet& obs);

}  // namespace bhcav
