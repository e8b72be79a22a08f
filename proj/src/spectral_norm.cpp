#include "spectral_cantor/spectral_norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spectral_cantor {

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::MatrixXcd gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hermitian_spectral_norm(const Eigen::MatrixXcd& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

PowerIterationResult top_singular_value(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_transpose,
    Eigen::Index dim, std::uint64_t seed, double tol, int max_iterations) {
  PowerIterationResult out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
  v.normalize();

  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd av = apply(v);
    const double sigma = av.norm();
    out.iterations = it;
    out.value = sigma;
    if (sigma == 0.0) {
      out.converged = true;
      return out;
    }
    if (it > 1 && std::abs(sigma - previous) <= tol * sigma) {
      out.converged = true;
      return out;
    }
    previous = sigma;
    v = apply_transpose(av);
    v.normalize();
  }
  return out;
}

}  // namespace spectral_cantor
