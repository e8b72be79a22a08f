#include "spectral_cantor/gns_cantor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spectral_cantor/spectral_norm.hpp"

namespace spectral_cantor {

namespace {

constexpr std::size_t kDefaultMaxLevel = 14;
constexpr std::size_t kHardMaxLevel = 26;
constexpr Eigen::Index kDenseNormLimit = 4096;

std::size_t level_of_size(Eigen::Index size) {
  if (size <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(size))) {
    throw std::invalid_argument("algebra element length must be a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(size)));
}

template <typename Vec>
void butterfly(Vec& v) {
  const Eigen::Index n = v.size();
  for (Eigen::Index h = 1; h < n; h <<= 1) {
    for (Eigen::Index i = 0; i < n; i += h << 1) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        const auto x = v[j];
        const auto y = v[j + h];
        v[j] = x + y;
        v[j + h] = x - y;
      }
    }
  }
}

Eigen::VectorXd parity_signs(std::size_t level) {
  const std::uint64_t n = std::uint64_t{1} << level;
  Eigen::VectorXd s(static_cast<Eigen::Index>(n));
  for (std::uint64_t m = 0; m < n; ++m) s[static_cast<Eigen::Index>(m)] = (std::popcount(m) & 1) ? -1.0 : 1.0;
  return s;
}

// Walsh coefficients a_hat(U) = tau(s_U a) of a function on 2^k atoms.
template <typename Vec>
Vec walsh_coefficients(const Vec& a) {
  Vec c = a;
  butterfly(c);
  const Eigen::Index n = c.size();
  for (Eigen::Index u = 0; u < n; ++u) {
    if (std::popcount(static_cast<std::uint64_t>(u)) & 1) c[u] = -c[u];
  }
  c /= static_cast<double>(n);
  return c;
}

template <typename Mat, typename Vec>
Mat commutator_from_coefficients(const Eigen::VectorXd& diag, const Vec& ahat) {
  const Eigen::Index n = diag.size();
  Mat c(n, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index s = 0; s < n; ++s) {
      c(s, t) = (diag[s] - diag[t]) * ahat[s ^ t];
    }
  }
  return c;
}

Eigen::VectorXd dirac_diagonal_for(const std::vector<double>& alphas, std::size_t level) {
  const std::uint64_t n = std::uint64_t{1} << level;
  Eigen::VectorXd d(static_cast<Eigen::Index>(n));
  for (std::uint64_t m = 0; m < n; ++m) {
    d[static_cast<Eigen::Index>(m)] = alphas[static_cast<std::size_t>(std::bit_width(m))];
  }
  return d;
}

double real_norm_on_block(const std::vector<double>& alphas, const Eigen::VectorXd& a_block,
                          std::size_t k) {
  if (k == 0) return 0.0;
  const Eigen::VectorXd diag = dirac_diagonal_for(alphas, k);
  const Eigen::VectorXd ahat = walsh_coefficients(a_block);
  if (a_block.size() <= kDenseNormLimit) {
    return spectral_norm(commutator_from_coefficients<Eigen::MatrixXd>(diag, ahat));
  }
  // Matrix-free: M_a in the Walsh basis is a conjugated diagonal.
  const Eigen::VectorXd sign = parity_signs(k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(a_block.size()));
  auto mult = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd x = sign.cwiseProduct(w);
    butterfly(x);
    x = x.cwiseProduct(a_block) * scale;
    butterfly(x);
    return Eigen::VectorXd(sign.cwiseProduct(x) * scale);
  };
  auto apply = [&](const Eigen::VectorXd& w) {
    return Eigen::VectorXd(diag.cwiseProduct(mult(w)) - mult(diag.cwiseProduct(w)));
  };
  auto apply_t = [&](const Eigen::VectorXd& w) { return Eigen::VectorXd(-apply(w)); };
  return top_singular_value(apply, apply_t, a_block.size(), 0x5eedULL).value;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiracSpec

std::string to_string(DiracKind kind) {
  switch (kind) {
    case DiracKind::geometric: return "geometric";
    case DiracKind::af_general: return "af_general";
    case DiracKind::uhf_sqrt: return "uhf_sqrt";
    case DiracKind::uhf_power: return "uhf_power";
    case DiracKind::custom: return "custom";
  }
  return "unknown";
}

DiracSpec DiracSpec::geometric(GammaParam gamma) {
  DiracSpec s;
  s.kind_ = DiracKind::geometric;
  s.gamma_ = gamma.value();
  return s;
}

DiracSpec DiracSpec::af_general(const std::vector<double>& betas, const std::vector<double>& cs) {
  if (betas.size() != cs.size()) throw std::invalid_argument("beta and c series must have equal length");
  DiracSpec s;
  s.kind_ = DiracKind::af_general;
  s.alphas_.assign(1, 0.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(std::isfinite(betas[i]) && betas[i] != 0.0)) throw std::invalid_argument("beta_n must be finite and nonzero");
    if (!(cs[i] > 0.0)) throw std::invalid_argument("c_n must be positive");
    s.alphas_.push_back(cs[i] / betas[i]);
  }
  return s;
}

DiracSpec DiracSpec::uhf_sqrt(const std::vector<double>& betas, const std::vector<double>& ms) {
  if (betas.size() != ms.size()) throw std::invalid_argument("beta and m series must have equal length");
  DiracSpec s;
  s.kind_ = DiracKind::uhf_sqrt;
  s.alphas_.assign(1, 0.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(std::isfinite(betas[i]) && betas[i] != 0.0)) throw std::invalid_argument("beta_n must be finite and nonzero");
    if (!(ms[i] >= 1.0)) throw std::invalid_argument("m_n must be at least 1");
    s.alphas_.push_back(std::sqrt(ms[i]) / betas[i]);
  }
  return s;
}

DiracSpec DiracSpec::uhf_power(double power, const std::vector<double>& ms) {
  DiracSpec s;
  s.kind_ = DiracKind::uhf_power;
  s.alphas_.assign(1, 0.0);
  for (double m : ms) {
    if (!(m >= 1.0)) throw std::invalid_argument("m_n must be at least 1");
    s.alphas_.push_back(std::pow(m, power));
  }
  return s;
}

DiracSpec DiracSpec::custom(std::vector<double> eigenvalues) {
  if (eigenvalues.empty() || eigenvalues.front() != 0.0) {
    throw std::invalid_argument("custom eigenvalue list must start with alpha_0 = 0");
  }
  for (double a : eigenvalues) {
    if (!std::isfinite(a)) throw std::invalid_argument("eigenvalues must be finite");
  }
  DiracSpec s;
  s.kind_ = DiracKind::custom;
  s.alphas_ = std::move(eigenvalues);
  return s;
}

double DiracSpec::eigenvalue(std::size_t n) const {
  if (n == 0) return 0.0;
  if (kind_ == DiracKind::geometric) {
    return scale_ * std::pow(*gamma_, 1.0 - static_cast<double>(n));
  }
  if (n >= alphas_.size()) {
    throw std::out_of_range("eigenvalues are only available up to n = " + std::to_string(horizon()));
  }
  return scale_ * alphas_[n];
}

std::size_t DiracSpec::horizon() const noexcept {
  if (kind_ == DiracKind::geometric) return std::numeric_limits<std::size_t>::max();
  return alphas_.empty() ? 0 : alphas_.size() - 1;
}

DiracSpec DiracSpec::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("scale factor must be positive");
  DiracSpec s = *this;
  s.scale_ *= c;
  return s;
}

std::string DiracSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (gamma_) os << "(gamma=" << *gamma_ << ")";
  if (kind_ != DiracKind::geometric) os << "[" << horizon() << " eigenvalues]";
  if (scale_ != 1.0) os << "*" << scale_;
  return os.str();
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement AlgebraElement::from_real(const Eigen::VectorXd& v) {
  level_of_size(v.size());
  return AlgebraElement(v.cast<std::complex<double>>());
}

AlgebraElement AlgebraElement::constant(std::size_t level, double c) {
  return AlgebraElement(Eigen::VectorXcd::Constant(Eigen::Index{1} << level, c));
}

AlgebraElement AlgebraElement::walsh(std::size_t level, std::uint64_t mask) {
  if (level < 64 && (mask >> level) != 0) throw std::invalid_argument("Walsh mask exceeds the level");
  const Eigen::Index n = Eigen::Index{1} << level;
  Eigen::VectorXcd v(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    // s_S(x) = prod_{k in S} (2 x_k - 1) = (-1)^{|S & ~x|}
    const auto off = mask & ~static_cast<std::uint64_t>(x);
    v[x] = (std::popcount(off) & 1) ? -1.0 : 1.0;
  }
  return AlgebraElement(std::move(v));
}

AlgebraElement AlgebraElement::symmetry(std::size_t level, std::size_t n) {
  if (n == 0 || n > level) throw std::invalid_argument("symmetry index must lie in 1..level");
  return walsh(level, std::uint64_t{1} << (n - 1));
}

std::size_t AlgebraElement::level() const { return level_of_size(values.size()); }

bool AlgebraElement::is_self_adjoint(double tol) const {
  return values.size() == 0 || values.imag().cwiseAbs().maxCoeff() <= tol;
}

std::size_t AlgebraElement::effective_level() const {
  const std::size_t n_level = level();
  for (std::size_t k = 0; k < n_level; ++k) {
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    bool ok = true;
    for (Eigen::Index i = 0; i < values.size() && ok; ++i) {
      ok = values[i] == values[static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) & mask)];
    }
    if (ok) return k;
  }
  return n_level;
}

AlgebraElement AlgebraElement::lifted(std::size_t target) const {
  const std::size_t k = level();
  if (target < k) throw std::invalid_argument("cannot lift an element to a coarser level");
  const Eigen::Index n = Eigen::Index{1} << target;
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = values[static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) & mask)];
  return AlgebraElement(std::move(v));
}

// ---------------------------------------------------------------------------
// TruncatedTriple

std::size_t default_max_level() {
  if (const char* env = std::getenv("SPECTRAL_CANTOR_MAX_LEVEL")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && static_cast<std::size_t>(v) <= kHardMaxLevel) {
      return static_cast<std::size_t>(v);
    }
    throw std::invalid_argument("SPECTRAL_CANTOR_MAX_LEVEL must be an integer in 1.." +
                                std::to_string(kHardMaxLevel));
  }
  return kDefaultMaxLevel;
}

TruncatedTriple build_triple(std::size_t level, const DiracSpec& spec,
                             std::optional<std::size_t> max_level) {
  if (level == 0) throw std::invalid_argument("truncation level must be at least 1");
  const std::size_t cap = max_level.value_or(default_max_level());
  if (level > cap) {
    throw std::length_error("level " + std::to_string(level) + " exceeds the memory cap " +
                            std::to_string(cap));
  }
  if (spec.horizon() < level) {
    throw std::invalid_argument("spec supplies only " + std::to_string(spec.horizon()) +
                                " eigenvalues, level " + std::to_string(level) + " needs more");
  }
  TruncatedTriple t;
  t.level_ = level;
  t.spec_ = spec;
  t.alphas_.resize(level + 1);
  for (std::size_t k = 0; k <= level; ++k) t.alphas_[k] = spec.eigenvalue(k);
  t.dirac_diag_ = dirac_diagonal_for(t.alphas_, level);
  t.walsh_sign_ = parity_signs(level);
  return t;
}

void fast_walsh_hadamard(Eigen::Ref<Eigen::VectorXd> v) { butterfly(v); }
void fast_walsh_hadamard(Eigen::Ref<Eigen::VectorXcd> v) { butterfly(v); }

Eigen::VectorXd TruncatedTriple::to_walsh(const Eigen::VectorXd& atoms) const {
  if (atoms.size() != static_cast<Eigen::Index>(atom_count())) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXd v = atoms;
  butterfly(v);
  return walsh_sign_.cwiseProduct(v) / std::sqrt(static_cast<double>(atom_count()));
}

Eigen::VectorXd TruncatedTriple::to_atoms(const Eigen::VectorXd& walsh) const {
  if (walsh.size() != static_cast<Eigen::Index>(atom_count())) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXd v = walsh_sign_.cwiseProduct(walsh);
  butterfly(v);
  return v / std::sqrt(static_cast<double>(atom_count()));
}

Eigen::VectorXcd TruncatedTriple::to_walsh(const Eigen::VectorXcd& atoms) const {
  if (atoms.size() != static_cast<Eigen::Index>(atom_count())) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXcd v = atoms;
  butterfly(v);
  return walsh_sign_.cast<std::complex<double>>().cwiseProduct(v) / std::sqrt(static_cast<double>(atom_count()));
}

Eigen::VectorXcd TruncatedTriple::to_atoms(const Eigen::VectorXcd& walsh) const {
  if (walsh.size() != static_cast<Eigen::Index>(atom_count())) throw std::invalid_argument("dimension mismatch");
  Eigen::VectorXcd v = walsh_sign_.cast<std::complex<double>>().cwiseProduct(walsh);
  butterfly(v);
  return v / std::sqrt(static_cast<double>(atom_count()));
}

Eigen::MatrixXd TruncatedTriple::walsh_basis() const {
  const Eigen::Index n = static_cast<Eigen::Index>(atom_count());
  Eigen::MatrixXd w(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index s = 0; s < n; ++s) {
    w.col(s) = AlgebraElement::walsh(level_, static_cast<std::uint64_t>(s)).real_values() * scale;
  }
  return w;
}

Eigen::MatrixXd TruncatedTriple::dirac_matrix_atoms() const {
  const Eigen::MatrixXd w = walsh_basis();
  return w * dirac_diag_.asDiagonal() * w.transpose();
}

Eigen::VectorXd TruncatedTriple::eigenprojection_diagonal(std::size_t k) const {
  if (k > level_) throw std::out_of_range("eigenprojection index exceeds the level");
  const Eigen::Index n = static_cast<Eigen::Index>(atom_count());
  Eigen::VectorXd q(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    q[s] = static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(s))) == k ? 1.0 : 0.0;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Operations

Eigen::MatrixXcd commutator(const TruncatedTriple& t, const AlgebraElement& a) {
  if (a.level() > t.level()) throw std::invalid_argument("dimension mismatch: element finer than the triple");
  const AlgebraElement full = a.lifted(t.level());
  const Eigen::VectorXcd ahat = walsh_coefficients(full.values);
  return commutator_from_coefficients<Eigen::MatrixXcd>(t.dirac_diagonal(), ahat);
}

Eigen::MatrixXd commutator_real(const TruncatedTriple& t, const Eigen::VectorXd& a) {
  if (a.size() != static_cast<Eigen::Index>(t.atom_count())) throw std::invalid_argument("dimension mismatch");
  return commutator_from_coefficients<Eigen::MatrixXd>(t.dirac_diagonal(), walsh_coefficients(a));
}

double commutator_norm_real(const TruncatedTriple& t, const Eigen::VectorXd& a) {
  if (a.size() != static_cast<Eigen::Index>(t.atom_count())) throw std::invalid_argument("dimension mismatch");
  const AlgebraElement el = AlgebraElement::from_real(a);
  const std::size_t k = el.effective_level();
  std::vector<double> alphas(k + 1);
  for (std::size_t i = 0; i <= k; ++i) alphas[i] = t.alpha(i);
  return real_norm_on_block(alphas, a.head(Eigen::Index{1} << k), k);
}

double commutator_norm(const TruncatedTriple& t, const AlgebraElement& a) {
  if (a.level() > t.level()) throw std::invalid_argument("dimension mismatch: element finer than the triple");
  const std::size_t k = a.effective_level();
  const Eigen::VectorXcd block = a.values.head(Eigen::Index{1} << k);
  if (a.is_self_adjoint()) {
    std::vector<double> alphas(k + 1);
    for (std::size_t i = 0; i <= k; ++i) alphas[i] = t.alpha(i);
    return real_norm_on_block(alphas, block.real(), k);
  }
  if (block.size() > kDenseNormLimit) {
    throw std::length_error("complex commutator norms are only supported up to 4096 atoms");
  }
  std::vector<double> alphas(k + 1);
  for (std::size_t i = 0; i <= k; ++i) alphas[i] = t.alpha(i);
  const Eigen::VectorXd diag = dirac_diagonal_for(alphas, k);
  return spectral_norm(commutator_from_coefficients<Eigen::MatrixXcd>(diag, walsh_coefficients(block)));
}

Eigen::VectorXd conditional_expectation(const Eigen::VectorXd& a, std::size_t level, std::size_t k) {
  if (k > level) throw std::out_of_range("conditional expectation level exceeds the truncation level");
  if (a.size() != (Eigen::Index{1} << level)) throw std::invalid_argument("dimension mismatch");
  const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(Eigen::Index{1} << k);
  for (Eigen::Index i = 0; i < a.size(); ++i) sums[static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) & mask)] += a[i];
  sums /= static_cast<double>(std::uint64_t{1} << (level - k));
  Eigen::VectorXd out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = sums[static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) & mask)];
  return out;
}

AlgebraElement conditional_expectation(const TruncatedTriple& t, const AlgebraElement& a, std::size_t k) {
  if (k > t.level()) throw std::out_of_range("conditional expectation level exceeds the truncation level");
  const AlgebraElement full = a.lifted(t.level());
  Eigen::VectorXcd out(full.values.size());
  out.real() = conditional_expectation(Eigen::VectorXd(full.values.real()), t.level(), k);
  out.imag() = conditional_expectation(Eigen::VectorXd(full.values.imag()), t.level(), k);
  return AlgebraElement(std::move(out));
}

double af_estimate_cn(const TruncatedTriple& t, std::size_t k) {
  if (k < 1 || k > t.level()) throw std::out_of_range("c_k is defined for 1 <= k <= level");
  const std::size_t level = t.level();
  const Eigen::VectorXd sk = AlgebraElement::symmetry(level, k).real_values();
  const std::uint64_t atoms_below = std::uint64_t{1} << (k - 1);
  const std::uint64_t mask = atoms_below - 1;
  double best = 0.0;
  for (std::uint64_t atom = 0; atom < atoms_below; ++atom) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sk.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if ((static_cast<std::uint64_t>(i) & mask) == atom) b[i] = sk[i];
    }
    // ||b||_2 is taken for the state tau, i.e. the normalized l^2 norm.
    const double l2 = std::sqrt(b.squaredNorm() / static_cast<double>(b.size()));
    best = std::max(best, b.cwiseAbs().maxCoeff() / l2);
  }
  return best;
}

std::vector<double> beta_sequence(const DiracSpec& spec, std::size_t horizon) {
  if (horizon > spec.horizon()) throw std::invalid_argument("horizon exceeds the eigenvalues the spec provides");
  std::vector<double> alphas(horizon + 1);
  for (std::size_t n = 0; n <= horizon; ++n) alphas[n] = spec.eigenvalue(n);
  std::vector<double> betas(horizon, 0.0);
  for (std::size_t n = 1; n <= horizon; ++n) {
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = std::abs(alphas[n] - alphas[i]);
      if (gap == 0.0) {
        sup = std::numeric_limits<double>::infinity();
        break;
      }
      sup = std::max(sup, 1.0 / gap);
    }
    betas[n - 1] = sup;
  }
  return betas;
}

double eigenvalue_condition_check(const DiracSpec& spec, std::optional<std::size_t> horizon) {
  if (!horizon && spec.unbounded()) {
    throw std::invalid_argument("an explicit horizon is required for an unbounded eigenvalue rule");
  }
  const std::vector<double> betas = beta_sequence(spec, horizon.value_or(spec.horizon()));
  double sum = 0.0;
  // Smallest terms first.
  for (auto it = betas.rbegin(); it != betas.rend(); ++it) sum += *it;
  return sum;
}

}  // namespace spectral_cantor
