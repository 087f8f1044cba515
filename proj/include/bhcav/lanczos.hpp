#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhcav {

struct LanczosOptions {
  int max_krylov = 40;    // Krylov vectors per restart cycle
  int max_restarts = 60;
  double tolerance = 1e-10;  // on ||H v - E v||
};

struct LanczosResult {
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int matvecs = 0;
  bool converged = false;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

namespace detail {

inline void project_out(Eigen::VectorXd& w, std::span<const Eigen::VectorXd> basis) {
  for (const auto& b : basis) w -= b.dot(w) * b;
}

}  // namespace detail

// Lowest eigenpair of a real symmetric operator by restarted Lanczos with full
// reorthogonalization. Each restart continues from the current Ritz vector.
// `deflate` holds orthonormal vectors the search is kept orthogonal to.
template <class Apply>
LanczosResult lowest_eigenpair(Apply&& apply, Eigen::VectorXd start,
                               const LanczosOptions& opt = {},
                               std::span<const Eigen::VectorXd> deflate = {}) {
  const Eigen::Index dim = start.size();
  LanczosResult res;
  if (dim == 0) throw std::invalid_argument("Lanczos on an empty space");

  detail::project_out(start, deflate);
  if (start.norm() < 1e-12) {
    // Deterministic fallback start vector.
    for (Eigen::Index i = 0; i < dim; ++i) start(i) = 1.0 + 0.1 * std::sin(1.0 + i);
    detail::project_out(start, deflate);
  }
  Eigen::VectorXd x = start.normalized();
  const int kmax =
      static_cast<int>(std::min<Eigen::Index>(opt.max_krylov, dim - static_cast<Eigen::Index>(deflate.size())));
  if (kmax <= 0) throw std::invalid_argument("deflation exhausts the space");

  std::vector<Eigen::VectorXd> V;
  V.reserve(kmax + 1);
  Eigen::VectorXd w(dim);
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    V.clear();
    V.push_back(x);
    std::vector<double> alpha, beta;
    double theta = 0.0;
    Eigen::VectorXd y;
    for (int j = 0; j < kmax; ++j) {
      w = apply(V[j]);
      ++res.matvecs;
      const double a = V[j].dot(w);
      alpha.push_back(a);
      // Three-term recurrence, then classical Gram-Schmidt against the whole
      // basis, repeated once when cancellation removed most of the vector.
      w -= a * V[j];
      if (j > 0) w -= beta[j - 1] * V[j - 1];
      double b = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        const double before = b;
        for (const auto& v : V) w -= v.dot(w) * v;
        detail::project_out(w, deflate);
        b = w.norm();
        if (b > 0.7 * before) break;
      }
      const int m = j + 1;
      Eigen::VectorXd diag(m), off(std::max(m - 1, 1));
      for (int k = 0; k < m; ++k) diag(k) = alpha[k];
      for (int k = 0; k + 1 < m; ++k) off(k) = beta[k];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, off.head(m - 1), Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()(0);
      y = tri.eigenvectors().col(0);
      const double estimate = b * std::abs(y(m - 1));
      const bool invariant = b < 1e-14 * std::max(1.0, std::abs(theta));
      if (estimate < 0.1 * opt.tolerance || invariant || m == kmax) break;
      beta.push_back(b);
      V.push_back(w / b);
    }
    x.setZero();
    for (Eigen::Index k = 0; k < y.size(); ++k) x += y(k) * V[k];
    x.normalize();
    w = apply(x);
    ++res.matvecs;
    theta = x.dot(w);
    w -= theta * x;
    detail::project_out(w, deflate);
    res.eigenvalue = theta;
    res.residual = w.norm();
    res.vector = x;
    if (res.residual <= opt.tolerance) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace bhcav
