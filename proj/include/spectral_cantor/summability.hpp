#pragma once

// Partial traces tr(D^-s) and tr((I + D^2)^(-p/2)) and the eigenvalue
// recipes for AF and UHF algebras.

#include <cstddef>
#include <functional>
#include <vector>

#include "spectral_cantor/cantor_points.hpp"
#include "spectral_cantor/gns_cantor.hpp"

namespace spectral_cantor {

/// Multiplicity of alpha_n (dimension of Q_n H), for n >= 0.
using Multiplicity = std::function<double(std::size_t)>;

/// 1 for n = 0, 2^(n-1) otherwise.
Multiplicity cantor_multiplicity();
/// Explicit list; entry i is the multiplicity of alpha_i.
Multiplicity multiplicity_from(std::vector<double> values);

struct TraceResult {
  double partial_sum = 0.0;
  double last_term = 0.0;
  double term_ratio = 0.0;  // last_term / previous term
  bool divergent = false;   // term_ratio >= 1 - 1e-12
  std::size_t horizon = 0;
};

/// sum_{n=1}^{k} |alpha_n|^(-s) mult(n); the kernel alpha_0 is skipped.
/// Throws std::invalid_argument for s <= 0 or a zero eigenvalue past n = 0.
TraceResult trace_power(const DiracSpec& spec, const Multiplicity& mult, double s, std::size_t horizon);

/// sum_{n=0}^{k} (1 + alpha_n^2)^(-p/2) mult(n).
TraceResult trace_resolvent(const DiracSpec& spec, const Multiplicity& mult, double p, std::size_t horizon);

/// (1 - q^k) / (1 - q) with q = 2 gamma^s, and k when q = 1.
double trace_power_closed_form(const GammaParam& g, double s, std::size_t horizon);

/// log 2 / (-log gamma).
double summability_threshold(const GammaParam& g);

struct UhfParams {
  std::vector<double> d;  // d_1, d_2, ...
  std::vector<double> m;  // m_n = d_1 ... d_n

  /// Rejects any d_n < 2.
  static UhfParams from_factors(std::vector<double> d);
};

/// m_n^2 - m_{n-1}^2 (m_0 = 1), and 1 for n = 0.
Multiplicity uhf_multiplicity(const UhfParams& params);

/// alpha_n = beta_n^-1 sqrt(m_n); needs one finite nonzero beta per level.
DiracSpec uhf_sqrt_spec(const UhfParams& params, const std::vector<double>& betas);
/// alpha_n = m_n^s; needs s > 1.
DiracSpec uhf_power_spec(const UhfParams& params, double s);

/// The general AF recipe for a target p: t = max(2, 3/p), beta_n = dim(A_n)^-t,
/// c_n = 1, so alpha_n = dim(A_n)^t. dims[i] is dim A_{i+1}; dims must be
/// strictly increasing and start above dim A_0 = 1.
DiracSpec af_recipe_spec(double p, const std::vector<double>& dims);
/// dim A_n - dim A_{n-1} for the same dimension list.
Multiplicity af_recipe_multiplicity(const std::vector<double>& dims);

}  // namespace spectral_cantor
