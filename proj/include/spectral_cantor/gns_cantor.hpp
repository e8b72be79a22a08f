#pragma once

// Level-N truncation of the GNS representation of C(prod Z_2) for the
// symmetric product state tau.
//
// The Hilbert space is l^2 over the 2^N atoms (every atom has mass 2^-N, so
// l^2 and L^2(tau) differ by a global scale that cancels in every operator
// identity used here). Two orthonormal bases are kept:
//
//   atom basis   - point masses; multiplication operators are diagonal,
//   Walsh basis  - s_S = prod_{k in S} s_k with s_k = 2 e_k - 1, indexed by the
//                  bit mask S (bit k-1 <-> coordinate k); D is diagonal with
//                  eigenvalue alpha_{max S} on s_S, and s_S spans part of Q_{max S} H.
//
// The change of basis is the Walsh-Hadamard transform scaled by 2^{-N/2}.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral_cantor/cantor_points.hpp"

namespace spectral_cantor {

enum class DiracKind { geometric, af_general, uhf_sqrt, uhf_power, custom };

std::string to_string(DiracKind kind);

/// Eigenvalue sequence alpha_0 = 0, alpha_1, alpha_2, ... of a Dirac operator
/// D = sum_n alpha_n Q_n, tagged with the recipe that produced it.
class DiracSpec {
 public:
  /// alpha_n = gamma^(1 - n).
  static DiracSpec geometric(GammaParam gamma);
  /// alpha_n = c_n / beta_n. betas[i] and cs[i] hold beta_{i+1}, c_{i+1}.
  static DiracSpec af_general(const std::vector<double>& betas, const std::vector<double>& cs);
  /// alpha_n = sqrt(m_n) / beta_n.
  static DiracSpec uhf_sqrt(const std::vector<double>& betas, const std::vector<double>& ms);
  /// alpha_n = m_n^s.
  static DiracSpec uhf_power(double s, const std::vector<double>& ms);
  /// Explicit list alpha_0, alpha_1, ...; alpha_0 must be 0.
  static DiracSpec custom(std::vector<double> eigenvalues);

  DiracKind kind() const noexcept { return kind_; }
  std::optional<double> gamma() const noexcept { return gamma_; }
  /// Multiplier applied to every eigenvalue (see scaled()).
  double scale() const noexcept { return scale_; }

  /// alpha_n; throws std::out_of_range past horizon().
  double eigenvalue(std::size_t n) const;
  /// Largest n for which eigenvalue(n) is defined; SIZE_MAX for geometric specs.
  std::size_t horizon() const noexcept;
  bool unbounded() const noexcept { return kind_ == DiracKind::geometric; }

  /// Eigenvalue rule of c * D.
  DiracSpec scaled(double c) const;

  std::string describe() const;

 private:
  DiracKind kind_ = DiracKind::custom;
  std::optional<double> gamma_;
  double scale_ = 1.0;
  std::vector<double> alphas_;  // alpha_0 .. alpha_K for list-backed kinds
};

/// Element of the level-N algebra: its values on the 2^N atoms.
struct AlgebraElement {
  Eigen::VectorXcd values;

  AlgebraElement() = default;
  explicit AlgebraElement(Eigen::VectorXcd v) : values(std::move(v)) {}
  static AlgebraElement from_real(const Eigen::VectorXd& v);
  static AlgebraElement constant(std::size_t level, double c);
  /// s_S for the coordinate mask S.
  static AlgebraElement walsh(std::size_t level, std::uint64_t mask);
  /// s_n = 2 e_n - 1 (n is 1-based).
  static AlgebraElement symmetry(std::size_t level, std::size_t n);

  std::size_t level() const;
  bool is_self_adjoint(double tol = 0.0) const;
  Eigen::VectorXd real_values() const { return values.real(); }
  /// Smallest k such that the element depends only on coordinates 1..k.
  std::size_t effective_level() const;
  /// Same function viewed at a finer level (constant along new coordinates).
  AlgebraElement lifted(std::size_t level) const;
  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

class TruncatedTriple {
 public:
  std::size_t level() const noexcept { return level_; }
  std::size_t atom_count() const noexcept { return std::size_t{1} << level_; }
  const DiracSpec& spec() const noexcept { return spec_; }

  /// alpha_{max S} for every Walsh mask S.
  const Eigen::VectorXd& dirac_diagonal() const noexcept { return dirac_diag_; }
  /// alpha_k for 0 <= k <= level.
  double alpha(std::size_t k) const { return alphas_.at(k); }

  /// Coordinates in the orthonormal Walsh basis of an atom-basis vector.
  Eigen::VectorXd to_walsh(const Eigen::VectorXd& atoms) const;
  Eigen::VectorXd to_atoms(const Eigen::VectorXd& walsh) const;
  Eigen::VectorXcd to_walsh(const Eigen::VectorXcd& atoms) const;
  Eigen::VectorXcd to_atoms(const Eigen::VectorXcd& walsh) const;

  /// Dense orthonormal Walsh basis: column S is s_S / 2^{N/2} in atom coordinates.
  Eigen::MatrixXd walsh_basis() const;
  /// Dense D in the atom basis.
  Eigen::MatrixXd dirac_matrix_atoms() const;
  /// Projection Q_k onto the alpha_k eigenspace, in the Walsh basis (diagonal 0/1).
  Eigen::VectorXd eigenprojection_diagonal(std::size_t k) const;

 private:
  friend TruncatedTriple build_triple(std::size_t, const DiracSpec&, std::optional<std::size_t>);
  std::size_t level_ = 0;
  DiracSpec spec_;
  std::vector<double> alphas_;
  Eigen::VectorXd dirac_diag_;
  Eigen::VectorXd walsh_sign_;  // (-1)^{|S|}
};

/// Memory cap on N: SPECTRAL_CANTOR_MAX_LEVEL if set, else 14.
std::size_t default_max_level();

/// Builds the level-N triple. Throws std::invalid_argument for N = 0 or a spec
/// with fewer than N eigenvalues, std::length_error above the level cap.
TruncatedTriple build_triple(std::size_t level, const DiracSpec& spec,
                             std::optional<std::size_t> max_level = std::nullopt);

/// In-place unnormalized Walsh-Hadamard butterfly: v_S <- sum_x (-1)^{|S & x|} v_x.
void fast_walsh_hadamard(Eigen::Ref<Eigen::VectorXd> v);
void fast_walsh_hadamard(Eigen::Ref<Eigen::VectorXcd> v);

/// [D, M_a] in the Walsh basis: entry (S, T) = (alpha_S - alpha_T) <s_S, a s_T>.
Eigen::MatrixXcd commutator(const TruncatedTriple& t, const AlgebraElement& a);
/// Real fast path for self-adjoint a given by real values; real antisymmetric result.
Eigen::MatrixXd commutator_real(const TruncatedTriple& t, const Eigen::VectorXd& a);

/// ||[D, M_a]||. Elements of level k only couple the leading 2^k Walsh
/// vectors, so the norm is computed on that block: dense eigensolve up to
/// 4096, seeded power iteration above.
double commutator_norm(const TruncatedTriple& t, const AlgebraElement& a);
double commutator_norm_real(const TruncatedTriple& t, const Eigen::VectorXd& a);

/// pi_k(a): average of a over coordinates k+1..N.
AlgebraElement conditional_expectation(const TruncatedTriple& t, const AlgebraElement& a,
                                       std::size_t k);
Eigen::VectorXd conditional_expectation(const Eigen::VectorXd& a, std::size_t level, std::size_t k);

/// Best constant c_k with ||pi_k(a) - pi_{k-1}(a)||_inf <= c_k ||Q_k a xi||,
/// maximized over single-atom witnesses 1_A s_k.
double af_estimate_cn(const TruncatedTriple& t, std::size_t k);

/// beta_n = max_{0 <= i < n} |alpha_n - alpha_i|^{-1} for n = 1..horizon
/// (entry n-1). Infinite when alpha_n repeats an earlier eigenvalue.
std::vector<double> beta_sequence(const DiracSpec& spec, std::size_t horizon);

/// Partial sum of beta_n up to the horizon (the rule's own horizon when
/// omitted; required for unbounded specs). +infinity if any beta_n is.
double eigenvalue_condition_check(const DiracSpec& spec,
                                  std::optional<std::size_t> horizon = std::nullopt);

}  // namespace spectral_cantor
