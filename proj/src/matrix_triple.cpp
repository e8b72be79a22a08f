#include "spectral_cantor/matrix_triple.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace spectral_cantor {

namespace {

void require_self_adjoint(const Eigen::MatrixXcd& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("expected a nonempty square matrix");
  if ((a - a.adjoint()).norm() > tol) throw std::invalid_argument("matrix is not self-adjoint");
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::MatrixXcd gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double re = normal(rng);
      g(i, j) = {re, normal(rng)};
    }
  }
  return g;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

MatrixState MatrixState::from_density(const Eigen::MatrixXcd& rho) {
  require_self_adjoint(rho, 1e-12);
  if (std::abs(rho.trace() - 1.0) > 1e-12) throw std::invalid_argument("density must have trace 1");
  if (eigenvalues(rho).minCoeff() < -1e-12) throw std::invalid_argument("density must be positive semidefinite");
  MatrixState s;
  s.rho_ = 0.5 * (rho + rho.adjoint());
  return s;
}

MatrixState MatrixState::pure(const Eigen::VectorXcd& v) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("zero vector");
  MatrixState s;
  s.rho_ = v * v.adjoint() / n2;
  return s;
}

MatrixState MatrixState::random(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXcd g = gaussian(n, rng);
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  MatrixState s;
  s.rho_ = 0.5 * (rho + rho.adjoint());
  return s;
}

std::complex<double> MatrixState::evaluate(const Eigen::MatrixXcd& a) const {
  if (a.rows() != rho_.rows() || a.cols() != rho_.cols()) throw std::invalid_argument("size mismatch");
  return (rho_ * a).trace();
}

double spread_half(const Eigen::MatrixXcd& a) {
  require_self_adjoint(a, 1e-10);
  const Eigen::VectorXd ev = eigenvalues(0.5 * (a + a.adjoint()));
  return 0.5 * (ev.maxCoeff() - ev.minCoeff());
}

Eigen::MatrixXd flip_matrix(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m * m, m * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) s(j * m + i, i * m + j) = 1.0;
  }
  return s;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return k;
}

double flip_commutator_norm(const Eigen::MatrixXcd& a) {
  require_self_adjoint(a, 1e-10);
  if (a.rows() > 64) throw std::length_error("n^2 x n^2 matrix exceeds the memory budget");
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXcd k = 0.5 * (kron(a, id) - kron(id, a));
  return eigenvalues(0.5 * (k + k.adjoint())).cwiseAbs().maxCoeff();
}

double flip_commutator_norm_direct(const Eigen::MatrixXcd& a) {
  require_self_adjoint(a, 1e-10);
  if (a.rows() > 64) throw std::length_error("n^2 x n^2 matrix exceeds the memory budget");
  const auto n = static_cast<std::size_t>(a.rows());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXcd p =
      0.5 * (Eigen::MatrixXcd::Identity(a.rows() * a.rows(), a.rows() * a.rows()) + flip_matrix(n).cast<std::complex<double>>());
  const Eigen::MatrixXcd pi = kron(id, a);
  const Eigen::MatrixXcd c = p * pi - pi * p;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c);
  return svd.singularValues()(0);
}

double state_norm_distance(const MatrixState& phi, const MatrixState& psi) {
  if (phi.size() != psi.size()) throw std::invalid_argument("states act on different matrix sizes");
  return eigenvalues(phi.density() - psi.density()).cwiseAbs().sum();
}

Eigen::MatrixXcd sign_witness(const MatrixState& phi, const MatrixState& psi) {
  if (phi.size() != psi.size()) throw std::invalid_argument("states act on different matrix sizes");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(phi.density() - psi.density());
  const Eigen::VectorXd sign = es.eigenvalues().unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
  return es.eigenvectors() * sign.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
}

UnithmReport verify_unithm(std::size_t n, std::size_t trials, std::uint64_t seed, double tolerance) {
  if (n < 1 || n > 10) throw std::invalid_argument("verify_unithm supports 1 <= n <= 10");
  UnithmReport r;
  r.n = n;
  r.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t);
    const MatrixState phi = MatrixState::random(n, rng());
    const MatrixState psi = MatrixState::random(n, rng());
    const double d = state_norm_distance(phi, psi);
    const Eigen::MatrixXcd w = sign_witness(phi, psi);
    const double lip = flip_commutator_norm(w);
    const double sup = lip > 0.0 ? std::abs(phi.evaluate(w) - psi.evaluate(w)) / lip : 0.0;
    r.max_deviation = std::max(r.max_deviation, std::abs(sup - d));
  }
  r.pass = r.max_deviation < tolerance;
  return r;
}

SpreadSeminorm::SpreadSeminorm(std::size_t n) {
  if (n < 2) throw std::invalid_argument("the spread seminorm needs n >= 2");
  const auto m = static_cast<Eigen::Index>(n);
  const std::complex<double> i1(0.0, 1.0);
  const double r2 = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j + 1; k < m; ++k) {
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m, m);
      s(j, k) = s(k, j) = r2;
      basis_.push_back(s);
      Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(m, m);
      t(j, k) = -i1 * r2;
      t(k, j) = i1 * r2;
      basis_.push_back(t);
    }
  }
  for (Eigen::Index l = 1; l < m; ++l) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) d(j, j) = scale;
    d(l, l) = -static_cast<double>(l) * scale;
    basis_.push_back(d);
  }
}

Eigen::MatrixXcd SpreadSeminorm::matrix(const Eigen::VectorXd& c) const {
  if (c.size() != dimension()) throw std::invalid_argument("coordinate vector has the wrong dimension");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(basis_[0].rows(), basis_[0].cols());
  for (std::size_t k = 0; k < basis_.size(); ++k) a += c[static_cast<Eigen::Index>(k)] * basis_[k];
  return a;
}

Eigen::VectorXd SpreadSeminorm::coordinates(const Eigen::MatrixXcd& m) const {
  Eigen::VectorXd c(dimension());
  for (std::size_t k = 0; k < basis_.size(); ++k) c[static_cast<Eigen::Index>(k)] = (basis_[k] * m).trace().real();
  return c;
}

double SpreadSeminorm::norm(const Eigen::VectorXd& c) const { return spread_half(matrix(c)); }

double SpreadSeminorm::smoothed(const Eigen::VectorXd& c, double mu, Eigen::VectorXd* grad, double* exact) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix(c));
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::VectorXd wmax, wmin;
  const double top = log_sum_exp(ev, mu, &wmax);
  const double bottom = log_sum_exp(-ev, mu, &wmin);
  if (exact) *exact = 0.5 * (ev.maxCoeff() - ev.minCoeff());
  if (grad) {
    // d lambda_i / d c_k = v_i^* b_k v_i.
    const Eigen::VectorXd w = 0.5 * (wmax - wmin);
    const Eigen::MatrixXcd g = es.eigenvectors() * w.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
    *grad = coordinates(g);
  }
  return 0.5 * (top + bottom);
}

SpreadSupremum spread_constrained_sup(const MatrixState& phi, const MatrixState& psi, const MinimizerOptions& options) {
  if (phi.size() != psi.size()) throw std::invalid_argument("states act on different matrix sizes");
  SpreadSupremum out;
  const Eigen::MatrixXcd delta = phi.density() - psi.density();
  if (delta.norm() == 0.0) {
    out.witness = Eigen::MatrixXcd::Zero(delta.rows(), delta.cols());
    out.converged = true;
    return out;
  }
  const SpreadSeminorm oracle(static_cast<std::size_t>(phi.size()));
  // (phi - psi)(a) = tr(delta a) is linear in the coordinates of a.
  const Eigen::VectorXd h = oracle.coordinates(delta);
  std::vector<Eigen::VectorXd> starts{h};
  for (Eigen::Index k = 0; k < oracle.dimension(); ++k) starts.push_back(Eigen::VectorXd::Unit(oracle.dimension(), k));
  const HyperplaneMinimum m = minimize_on_hyperplane(oracle, h, starts, options);
  out.value = 1.0 / m.norm;
  out.witness = oracle.matrix(m.point / m.norm);
  out.converged = m.converged;
  return out;
}

}  // namespace spectral_cantor
