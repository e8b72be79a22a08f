#pragma once

// Connes distance d(phi, psi) = sup{ |phi(a) - psi(a)| : ||[D, a]|| <= 1 } on
// states of the level-N Cantor algebra.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spectral_cantor/cantor_points.hpp"
#include "spectral_cantor/gns_cantor.hpp"
#include "spectral_cantor/seminorm_min.hpp"

namespace spectral_cantor {

/// Probability weights over the 2^N atoms.
class State {
 public:
  /// Validates nonnegativity and unit mass (1e-12); length must be 2^N.
  static State from_weights(Eigen::VectorXd weights);
  static State point(const CantorPoint& x, std::size_t level);
  static State point_index(std::uint64_t atom, std::size_t level);
  /// tau, the uniform measure.
  static State uniform(std::size_t level);
  /// Uniform measure on the level-n cylinder containing x.
  static State cylinder(const CantorPoint& x, std::size_t n, std::size_t level);

  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  std::size_t level() const;
  /// Atom index when the state is a point mass.
  std::optional<std::uint64_t> point_atom() const;
  double evaluate(const Eigen::VectorXd& a) const { return weights_.dot(a); }
  /// The same measure on the level-n atoms, n >= level(), new coordinates 0.
  State lifted(std::size_t level) const;

 private:
  explicit State(Eigen::VectorXd w) : weights_(std::move(w)) {}
  Eigen::VectorXd weights_;
};

struct DistanceResult {
  double value = 0.0;          // certified lower bound, (phi - psi)(witness)
  Eigen::VectorXd witness;     // atom values of a with ||[D, a]|| <= 1
  double upper_bound = 0.0;    // tightest available bound
  std::optional<double> analytic_upper;  // 2 gamma^(m-1) / (1 - gamma)^2 for geometric point states
  double witness_norm = 0.0;   // ||[D, witness]||
  int iterations = 0;
  bool converged = true;
};

struct ConnesOptions {
  MinimizerOptions minimizer;
  /// Restrict to functions invariant under the tree automorphisms fixing both states.
  bool use_symmetry = true;
  /// Extra starting point (atom values), e.g. a coarser-level witness.
  std::optional<Eigen::VectorXd> warm_start;
};

DistanceResult connes_distance(const TruncatedTriple& t, const State& phi, const State& psi,
                               const ConnesOptions& options = {});

/// Orbit label of every atom under the automorphisms of the binary tree of
/// depth N that preserve both weight vectors. Labels are 0..count-1.
std::vector<std::size_t> invariant_orbits(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi,
                                          std::size_t level);

/// Upper bound ||phi - psi||_1 * sum_{j = n0+1}^{N} beta_j, with n0 the
/// largest level on which the marginals of phi and psi agree.
double marginal_upper_bound(const TruncatedTriple& t, const State& phi, const State& psi);

/// gamma^(m-1) s_m at the given level (m <= level).
AlgebraElement lower_bound_witness(const GammaParam& g, std::size_t m, std::size_t level);

struct DiameterReport {
  double beta_sum = 0.0;        // sum_{j <= N} beta_j
  double sampled_max = 0.0;     // max ||a - tau(a)||_inf over sampled a in D
  double refined_max = 0.0;     // same, over optimizer-refined elements
  double worst_tail_ratio = 0.0;  // max over n of ||a - pi_n a||_inf / sum_{j>n} beta_j
  std::size_t samples = 0;
  bool pass = true;
};

/// Samples random normalized elements, the witnesses gamma^(k-1) s_k and
/// optimizer witnesses for d(chi_x, tau), and checks the diameter and tail
/// bounds. Throws std::invalid_argument if some beta_j is infinite.
DiameterReport diameter_bound_check(const TruncatedTriple& t, std::size_t samples, std::uint64_t seed,
                                    std::size_t refined = 4);

/// Independent grid-search value of d(phi, psi) for N <= 2: D is assembled in
/// the atom basis, norms come from an SVD, and the quotient by constants is
/// parametrized directly. `grid` is the number of points per axis.
double brute_force_oracle(const TruncatedTriple& t, const State& phi, const State& psi, int grid = 400);

}  // namespace spectral_cantor
