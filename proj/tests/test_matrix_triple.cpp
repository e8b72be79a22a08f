#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "spectral_cantor/matrix_triple.hpp"

using namespace spectral_cantor;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = {normal(rng), normal(rng)};
  }
  return (g + g.adjoint()) / 2.0;
}

double eigen_spread(const Eigen::MatrixXcd& a) {
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a, Eigen::EigenvaluesOnly).eigenvalues();
  return (ev.maxCoeff() - ev.minCoeff()) / 2.0;
}

// [P, I (x) a] with P = (I + S)/2, the flip written out entry by entry.
double commutator_from_scratch(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) S(j * n + i, i * n + j) = 1.0;
  }
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n * n, n * n);
  for (Eigen::Index c = 0; c < n; ++c) L.block(c * n, c * n, n, n) = a;
  const Eigen::MatrixXcd P = (Eigen::MatrixXcd::Identity(n * n, n * n) + S) / 2.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(P * L - L * P).singularValues()(0);
}

}  // namespace

TEST_CASE("spread examples") {
  CHECK(spread_half(Eigen::MatrixXcd::Identity(3, 3)) == 0.0);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, -1.0;
  CHECK(spread_half(d) == doctest::Approx(2.0));
  CHECK(flip_commutator_norm(d) == doctest::Approx(2.0));
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
  z.diagonal() << 1.0, -1.0;
  CHECK(spread_half(z) == doctest::Approx(1.0));
  CHECK(flip_commutator_norm_direct(z) == doctest::Approx(1.0));
  Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(spread_half(nh), std::invalid_argument);
}

TEST_CASE("flip matrix") {
  for (std::size_t n : {1U, 2U, 5U}) {
    const Eigen::MatrixXd S = flip_matrix(n);
    const auto N = static_cast<Eigen::Index>(n * n);
    CHECK(S * S == Eigen::MatrixXd::Identity(N, N));
    CHECK(S.transpose() == S);
    CHECK((S.array() == 0.0 || S.array() == 1.0).all());
    std::mt19937_64 rng(31);
    const Eigen::MatrixXcd x = random_hermitian(rng, static_cast<Eigen::Index>(n)) + cd(0.0, 1.0) * Eigen::MatrixXcd::Ones(n, n);
    const Eigen::MatrixXcd xt = x.transpose();
    const Eigen::VectorXcd vx = Eigen::Map<const Eigen::VectorXcd>(x.data(), N);
    const Eigen::VectorXcd vxt = Eigen::Map<const Eigen::VectorXcd>(xt.data(), N);
    CHECK((S.cast<cd>() * vx - vxt).cwiseAbs().maxCoeff() == 0.0);
  }
  Eigen::MatrixXcd a(1, 2), b(2, 1);
  a << 1.0, 2.0;
  b << 3.0, cd(0.0, 1.0);
  const Eigen::MatrixXcd k = kron(a, b);
  CHECK(k.rows() == 2);
  CHECK(k.cols() == 2);
  CHECK(k(1, 1) == cd(0.0, 2.0));
}

TEST_CASE("the two seminorms agree") {
  std::mt19937_64 rng(32);
  for (Eigen::Index n = 2; n <= 8; ++n) {
    const int trials = n <= 4 ? 1000 : 100;
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
      const Eigen::MatrixXcd a = random_hermitian(rng, n);
      const double s = eigen_spread(a);
      worst = std::max(worst, std::abs(flip_commutator_norm(a) - s));
      worst = std::max(worst, std::abs(spread_half(a) - s));
      if (i < 10) worst = std::max(worst, std::abs(flip_commutator_norm_direct(a) - s));
      if (i < 3 && n <= 5) worst = std::max(worst, std::abs(commutator_from_scratch(a) - s));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("translation invariance") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXcd a = random_hermitian(rng, 4);
    const Eigen::MatrixXcd shifted = a + 10.0 * normal(rng) * Eigen::MatrixXcd::Identity(4, 4);
    CHECK(std::abs(flip_commutator_norm(shifted) - flip_commutator_norm(a)) <= 1e-10);
    CHECK(std::abs(flip_commutator_norm_direct(shifted) - flip_commutator_norm_direct(a)) <= 1e-10);
  }
}

TEST_CASE("state distance") {
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(3), e1 = Eigen::VectorXcd::Zero(3);
  e0[0] = 1.0;
  e1[1] = cd(0.0, 2.0);
  const auto p = MatrixState::pure(e0), q = MatrixState::pure(e1);
  CHECK(state_norm_distance(p, q) == doctest::Approx(2.0));
  CHECK(state_norm_distance(p, p) == 0.0);
  const auto mixed = MatrixState::from_density(Eigen::MatrixXcd::Identity(3, 3) / 3.0);
  // |e0><e0| - I/3 has eigenvalues 2/3, -1/3, -1/3.
  CHECK(state_norm_distance(p, mixed) == doctest::Approx(4.0 / 3.0));
  const Eigen::MatrixXcd w = sign_witness(p, q);
  CHECK(spread_half(w) == doctest::Approx(1.0));
  CHECK(std::abs(p.evaluate(w) - q.evaluate(w)) == doctest::Approx(2.0));
  CHECK(sign_witness(p, p).isZero());
  CHECK_THROWS_AS(state_norm_distance(p, MatrixState::random(2, 1)), std::invalid_argument);
}

TEST_CASE("density validation") {
  CHECK_THROWS_AS(MatrixState::from_density(Eigen::MatrixXcd::Identity(2, 2)), std::invalid_argument);
  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Zero(2, 2);
  neg.diagonal() << 1.5, -0.5;
  CHECK_THROWS_AS(MatrixState::from_density(neg), std::invalid_argument);
  Eigen::MatrixXcd nh = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(MatrixState::from_density(nh), std::invalid_argument);
  const auto r = MatrixState::random(5, 7);
  CHECK(std::abs(r.density().trace() - 1.0) <= 1e-12);
  CHECK((r.density() - r.density().adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(MatrixState::random(5, 7).density() == r.density());
}

TEST_CASE("iterative supremum matches the trace norm") {
  for (std::uint64_t seed : {1U, 2U, 3U}) {
    const auto phi = MatrixState::random(4, seed), psi = MatrixState::random(4, seed + 100);
    const auto sup = spread_constrained_sup(phi, psi);
    CHECK(std::abs(sup.value - state_norm_distance(phi, psi)) <= 1e-6);
    CHECK(spread_half(sup.witness) <= 1.0 + 1e-9);
    CHECK(std::abs(std::abs(phi.evaluate(sup.witness) - psi.evaluate(sup.witness)) - sup.value) <= 1e-9);
  }
  const auto phi = MatrixState::random(3, 4);
  CHECK(spread_constrained_sup(phi, phi).value == 0.0);
}

TEST_CASE("spread seminorm coordinates") {
  const SpreadSeminorm s(3);
  CHECK(s.dimension() == 8);
  std::mt19937_64 rng(34);
  Eigen::MatrixXcd a = random_hermitian(rng, 3);
  a -= (a.trace() / 3.0) * Eigen::MatrixXcd::Identity(3, 3);
  const Eigen::VectorXd c = s.coordinates(a);
  CHECK((s.matrix(c) - a).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.norm(c) == doctest::Approx(eigen_spread(a)).epsilon(1e-12));
}

TEST_CASE("norm metric is recovered") {
  const auto two = verify_unithm(2, 100, 5);
  CHECK(two.max_deviation < 1e-8);
  CHECK(two.pass);
  CHECK(two.trials == 100);
  const auto eight = verify_unithm(8, 20, 6);
  CHECK(eight.max_deviation < 1e-7);
  CHECK(verify_unithm(1, 5, 1).max_deviation == 0.0);
  CHECK_THROWS_AS(verify_unithm(11, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(verify_unithm(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(flip_commutator_norm(Eigen::MatrixXcd::Identity(65, 65)), std::length_error);
}
