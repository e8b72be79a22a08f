#pragma once

// Minimizing a convex seminorm p over the hyperplane {c : h.c = 1}.
//
// sup{h.c : p(c) <= 1} = 1 / min{p(c) : h.c = 1}, so any point c on the
// hyperplane certifies the lower bound 1/p(c) with the feasible witness
// c/p(c). The minimization runs BFGS on a log-sum-exp smoothing of p with a
// decreasing smoothing parameter.

#include <vector>

#include <Eigen/Dense>

namespace spectral_cantor {

class SeminormOracle {
 public:
  virtual ~SeminormOracle() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double norm(const Eigen::VectorXd& c) const = 0;
  /// Smoothed seminorm p_mu(c) >= p(c); writes its gradient to *grad when
  /// grad is non-null and the exact p(c) to *exact.
  virtual double smoothed(const Eigen::VectorXd& c, double mu, Eigen::VectorXd* grad,
                          double* exact) const = 0;
};

struct MinimizerOptions {
  int max_iterations = 20000;
  int stall_window = 50;
  double stall_tolerance = 1e-10;
  /// Smoothing parameters relative to the starting value of p.
  std::vector<double> smoothing{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
};

struct HyperplaneMinimum {
  Eigen::VectorXd point;  // on the hyperplane
  double norm = 0.0;      // p(point), the smallest seen
  int iterations = 0;
  bool converged = false;
};

/// Starts that are (numerically) orthogonal to h are skipped; the others are
/// rescaled onto the hyperplane and the one with the smallest p is used.
/// Throws std::invalid_argument when h = 0 or no start is usable.
HyperplaneMinimum minimize_on_hyperplane(const SeminormOracle& oracle, const Eigen::VectorXd& h,
                                         const std::vector<Eigen::VectorXd>& starts,
                                         const MinimizerOptions& options = {});

/// Orthonormal basis (as columns) of the orthogonal complement of the unit
/// vector u, from the Householder reflection taking e_1 to u.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& u);

/// mu * log(sum_j exp(x_j / mu)) and the softmax weights, x sorted descending.
double log_sum_exp(const Eigen::VectorXd& x, double mu, Eigen::VectorXd* weights);

}  // namespace spectral_cantor
