#pragma once

// Operator-norm helpers shared by the Cantor and matrix triples.

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace spectral_cantor {

/// Largest singular value of a dense real matrix, from the symmetric
/// eigenproblem of A^T A.
double spectral_norm(const Eigen::MatrixXd& a);
double spectral_norm(const Eigen::MatrixXcd& a);

/// max |lambda| for a self-adjoint matrix.
double hermitian_spectral_norm(const Eigen::MatrixXcd& h);

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value of a linear operator given only through products
/// with A and A^T. Power iteration on A^T A from a seeded random start;
/// stops when successive estimates agree to `tol` relative.
PowerIterationResult top_singular_value(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_transpose,
    Eigen::Index dim, std::uint64_t seed, double tol = 1e-10, int max_iterations = 200000);

}  // namespace spectral_cantor
