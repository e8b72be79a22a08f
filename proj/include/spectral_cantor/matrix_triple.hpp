#pragma once

// The flip triple on M_n: GNS space C^n (x) C^n, P = (I + S)/2 with S the
// flip, and the identity ||[P, pi(a)]|| = spread(a)/2 that recovers the
// norm metric on states.
//
// Vectorization is column-major: vec(x)[c n + r] = x(r, c), so left
// multiplication by a is I (x) a and S vec(x) = vec(x^T).

#include <cstddef>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "spectral_cantor/seminorm_min.hpp"

namespace spectral_cantor {

class MatrixState {
 public:
  /// Throws std::invalid_argument unless rho is self-adjoint (1e-12), has
  /// eigenvalues >= -1e-12 and trace 1 within 1e-12.
  static MatrixState from_density(const Eigen::MatrixXcd& rho);
  /// Vector state |v><v| / |v|^2.
  static MatrixState pure(const Eigen::VectorXcd& v);
  /// rho = G G^* / tr(G G^*) with G complex Gaussian.
  static MatrixState random(std::size_t n, std::uint64_t seed);

  const Eigen::MatrixXcd& density() const noexcept { return rho_; }
  Eigen::Index size() const noexcept { return rho_.rows(); }
  std::complex<double> evaluate(const Eigen::MatrixXcd& a) const;

 private:
  Eigen::MatrixXcd rho_;
};

/// (lambda_max - lambda_min) / 2. Rejects a with ||a - a^*|| > 1e-10.
double spread_half(const Eigen::MatrixXcd& a);

/// n^2 x n^2 permutation S(e_i (x) e_j) = e_j (x) e_i.
Eigen::MatrixXd flip_matrix(std::size_t n);

/// Kronecker product a (x) b.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Spectral norm of (a (x) I - I (x) a) / 2. Throws std::length_error for n > 64.
double flip_commutator_norm(const Eigen::MatrixXcd& a);
/// Spectral norm of [P, I (x) a] built from the flip matrix.
double flip_commutator_norm_direct(const Eigen::MatrixXcd& a);

/// Trace norm of rho_phi - rho_psi. Throws std::invalid_argument on a size mismatch.
double state_norm_distance(const MatrixState& phi, const MatrixState& psi);
/// sign(rho_phi - rho_psi), zero on the kernel.
Eigen::MatrixXcd sign_witness(const MatrixState& phi, const MatrixState& psi);

struct UnithmReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  double max_deviation = 0.0;
  bool pass = false;  // max_deviation < tolerance
};

/// For random state pairs, compares the trace norm with |(phi - psi)(w)| /
/// ||[P, pi(w)]|| at the sign witness w. Trial i uses seeds derived from
/// (seed, i). Throws std::invalid_argument for n < 1 or n > 10.
UnithmReport verify_unithm(std::size_t n, std::size_t trials, std::uint64_t seed, double tolerance = 1e-7);

/// spread_half on traceless self-adjoint matrices, parametrized by real
/// coordinates in an orthonormal (Hilbert-Schmidt) basis.
class SpreadSeminorm : public SeminormOracle {
 public:
  explicit SpreadSeminorm(std::size_t n);

  Eigen::Index dimension() const override { return static_cast<Eigen::Index>(basis_.size()); }
  double norm(const Eigen::VectorXd& c) const override;
  double smoothed(const Eigen::VectorXd& c, double mu, Eigen::VectorXd* grad, double* exact) const override;

  Eigen::MatrixXcd matrix(const Eigen::VectorXd& c) const;
  /// Coordinates tr(b_k m) of a self-adjoint m in the basis.
  Eigen::VectorXd coordinates(const Eigen::MatrixXcd& m) const;

 private:
  std::vector<Eigen::MatrixXcd> basis_;
};

struct SpreadSupremum {
  double value = 0.0;
  Eigen::MatrixXcd witness;  // spread_half(witness) = 1
  bool converged = false;
};

/// sup{ |(phi - psi)(a)| : a = a^*, spread_half(a) <= 1 } by iterative
/// minimization, without using the sign witness.
SpreadSupremum spread_constrained_sup(const MatrixState& phi, const MatrixState& psi,
                                      const MinimizerOptions& options = {});

}  // namespace spectral_cantor
