#include "spectral_cantor/connes_distance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>

#include "spectral_cantor/spectral_norm.hpp"

namespace spectral_cantor {

namespace {

std::size_t level_of(Eigen::Index size) {
  if (size <= 1 || !std::has_single_bit(static_cast<std::uint64_t>(size))) {
    throw std::invalid_argument("state must have 2^N weights with N >= 1");
  }
  return static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(size)));
}

// Invariant functions are constant on the cells of a partition of the atoms.
// When every cell is the leaf set of a subtree, the functions vanishing in
// mean on each cell form a D-invariant subspace on which M_a is scalar, so
// [D, M_a] lives on the cell-constant functions alone. There D acts as the
// k x k matrix dcell = U^T D U, with U the normalized cell indicators.
struct CellOperator {
  std::vector<std::size_t> cell;  // cell of each atom
  std::vector<double> size;
  Eigen::MatrixXd dcell;
};

bool subtree_aligned(const std::vector<std::size_t>& part, std::size_t count, std::size_t level) {
  std::vector<std::size_t> size(count, 0);
  std::vector<std::uint64_t> first(count, ~std::uint64_t{0});
  for (std::size_t x = 0; x < part.size(); ++x) {
    ++size[part[x]];
    first[part[x]] = std::min<std::uint64_t>(first[part[x]], x);
  }
  for (std::size_t c = 0; c < count; ++c) {
    if (!std::has_single_bit(size[c])) return false;
  }
  for (std::size_t x = 0; x < part.size(); ++x) {
    const std::size_t c = part[x];
    const std::size_t depth = level - static_cast<std::size_t>(std::countr_zero(size[c]));
    const std::uint64_t mask = (std::uint64_t{1} << depth) - 1;
    if ((x & mask) != (first[c] & mask)) return false;
  }
  return true;
}

CellOperator make_cell_operator(const TruncatedTriple& t, std::vector<std::size_t> cell, std::size_t count) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.atom_count());
  CellOperator op;
  op.cell = std::move(cell);
  op.size.assign(count, 0.0);
  for (std::size_t c : op.cell) op.size[c] += 1.0;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(count));
  for (Eigen::Index x = 0; x < n; ++x) {
    const std::size_t c = op.cell[static_cast<std::size_t>(x)];
    u(x, static_cast<Eigen::Index>(c)) = 1.0 / std::sqrt(op.size[c]);
  }
  Eigen::MatrixXd du(n, u.cols());
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    du.col(c) = t.to_atoms(Eigen::VectorXd(t.dirac_diagonal().cwiseProduct(t.to_walsh(Eigen::VectorXd(u.col(c))))));
  }
  op.dcell = u.transpose() * du;
  op.dcell = 0.5 * (op.dcell + op.dcell.transpose()).eval();
  return op;
}

// ||[D, M_a]|| for a = map * c given as values on the cells.
class CellSeminorm final : public SeminormOracle {
 public:
  CellSeminorm(const CellOperator& op, Eigen::MatrixXd map) : op_(op), map_(std::move(map)) {}

  Eigen::Index dimension() const override { return map_.cols(); }

  double norm(const Eigen::VectorXd& c) const override {
    const Eigen::MatrixXd cm = commutator_of(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cm.transpose() * cm, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  double smoothed(const Eigen::VectorXd& c, double mu, Eigen::VectorXd* grad, double* exact) const override {
    const Eigen::MatrixXd cm = commutator_of(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        cm.transpose() * cm, grad ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    const Eigen::VectorXd sigma = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    if (exact) *exact = sigma.maxCoeff();
    Eigen::VectorXd w;
    const double f = log_sum_exp(sigma, mu, &w);
    if (grad) {
      // d sigma_j = q_j^T (D dA - dA D) p_j with q_j = C p_j / sigma_j.
      Eigen::VectorXd gcell = Eigen::VectorXd::Zero(cm.rows());
      for (Eigen::Index j = 0; j < sigma.size(); ++j) {
        if (w[j] < 1e-18 || sigma[j] <= 0.0) continue;
        const Eigen::VectorXd p = es.eigenvectors().col(j);
        const Eigen::VectorXd q = cm * p / sigma[j];
        gcell += w[j] * ((op_.dcell * q).cwiseProduct(p) - q.cwiseProduct(op_.dcell * p));
      }
      *grad = map_.transpose() * gcell;
    }
    return f;
  }

 private:
  Eigen::MatrixXd commutator_of(const Eigen::VectorXd& c) const {
    const Eigen::VectorXd a = map_ * c;
    return op_.dcell * a.asDiagonal() - a.asDiagonal() * op_.dcell;
  }

  const CellOperator& op_;
  Eigen::MatrixXd map_;
};

// Orthonormal (in l^2 of the atoms) coordinates for the orbit-constant
// functions with zero mean: column j holds the value on each orbit.
Eigen::MatrixXd orbit_value_basis(const std::vector<std::size_t>& orbit, std::size_t count) {
  const double n = static_cast<double>(orbit.size());
  std::vector<double> size(count, 0.0);
  for (std::size_t o : orbit) size[o] += 1.0;
  Eigen::VectorXd w(static_cast<Eigen::Index>(count));
  for (std::size_t o = 0; o < count; ++o) w[static_cast<Eigen::Index>(o)] = std::sqrt(size[o] / n);
  Eigen::MatrixXd q = complement_basis(w);
  for (std::size_t o = 0; o < count; ++o) q.row(static_cast<Eigen::Index>(o)) /= std::sqrt(size[o]);
  return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// State

State State::from_weights(Eigen::VectorXd weights) {
  level_of(weights.size());
  if (!weights.allFinite() || weights.minCoeff() < 0.0) {
    throw std::invalid_argument("state weights must be finite and nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw std::invalid_argument("state weights must sum to 1");
  return State(std::move(weights));
}

State State::point(const CantorPoint& x, std::size_t level) { return point_index(x.atom_index(level), level); }

State State::point_index(std::uint64_t atom, std::size_t level) {
  if (level == 0 || level > 62 || (atom >> level) != 0) throw std::invalid_argument("atom outside the level");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(Eigen::Index{1} << level);
  w[static_cast<Eigen::Index>(atom)] = 1.0;
  return State(std::move(w));
}

State State::uniform(std::size_t level) {
  if (level == 0 || level > 62) throw std::invalid_argument("level out of range");
  const Eigen::Index n = Eigen::Index{1} << level;
  return State(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

State State::cylinder(const CantorPoint& x, std::size_t n, std::size_t level) {
  if (n > level) throw std::invalid_argument("cylinder level exceeds the algebra level");
  const std::uint64_t prefix = x.truncated(n).atom_index(level);
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(Eigen::Index{1} << level);
  const double mass = 1.0 / static_cast<double>(std::uint64_t{1} << (level - n));
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if ((static_cast<std::uint64_t>(i) & mask) == prefix) w[i] = mass;
  }
  return State(std::move(w));
}

std::size_t State::level() const { return level_of(weights_.size()); }

std::optional<std::uint64_t> State::point_atom() const {
  Eigen::Index idx = 0;
  if (weights_.maxCoeff(&idx) == 1.0) return static_cast<std::uint64_t>(idx);
  return std::nullopt;
}

State State::lifted(std::size_t target) const {
  const std::size_t k = level();
  if (target < k) throw std::invalid_argument("cannot lift a state to a coarser level");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(Eigen::Index{1} << target);
  w.head(weights_.size()) = weights_;
  return State(std::move(w));
}

// ---------------------------------------------------------------------------
// Symmetry

std::vector<std::size_t> invariant_orbits(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi,
                                          std::size_t level) {
  const std::size_t n = std::size_t{1} << level;
  if (static_cast<std::size_t>(phi.size()) != n || static_cast<std::size_t>(psi.size()) != n) {
    throw std::invalid_argument("dimension mismatch");
  }
  // label[d][v]: isomorphism class of the subtree under depth-d node v
  // (prefix v on coordinates 1..d), together with its weights.
  std::vector<std::vector<std::size_t>> label(level + 1);
  {
    std::map<std::pair<double, double>, std::size_t> ids;
    label[level].resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      const auto key = std::make_pair(phi[static_cast<Eigen::Index>(x)], psi[static_cast<Eigen::Index>(x)]);
      label[level][x] = ids.try_emplace(key, ids.size()).first->second;
    }
  }
  for (std::size_t d = level; d-- > 0;) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
    const std::size_t width = std::size_t{1} << d;
    label[d].resize(width);
    for (std::size_t v = 0; v < width; ++v) {
      std::size_t a = label[d + 1][v];
      std::size_t b = label[d + 1][v | width];
      if (a > b) std::swap(a, b);
      label[d][v] = ids.try_emplace({a, b}, ids.size()).first->second;
    }
  }
  std::vector<std::size_t> orbit(1, 0);
  for (std::size_t d = 0; d < level; ++d) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
    const std::size_t width = std::size_t{1} << d;
    std::vector<std::size_t> next(width * 2);
    for (std::size_t v = 0; v < width * 2; ++v) {
      const std::size_t parent = v & (width - 1);
      next[v] = ids.try_emplace({orbit[parent], label[d + 1][v]}, ids.size()).first->second;
    }
    orbit = std::move(next);
  }
  return orbit;
}

// ---------------------------------------------------------------------------
// Distances

double marginal_upper_bound(const TruncatedTriple& t, const State& phi, const State& psi) {
  const std::size_t level = t.level();
  if (phi.level() != level || psi.level() != level) throw std::invalid_argument("state level mismatch");
  const Eigen::VectorXd diff = phi.weights() - psi.weights();
  const double l1 = diff.lpNorm<1>();
  if (l1 == 0.0) return 0.0;
  std::size_t n0 = 0;
  for (std::size_t n = 1; n < level; ++n) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < diff.size(); ++i) m[static_cast<Eigen::Index>(static_cast<std::uint64_t>(i) & mask)] += diff[i];
    if (m.cwiseAbs().maxCoeff() > 1e-15) break;
    n0 = n;
  }
  const std::vector<double> betas = beta_sequence(t.spec(), level);
  double tail = 0.0;
  for (std::size_t j = level; j > n0; --j) tail += betas[j - 1];
  return l1 * tail;
}

AlgebraElement lower_bound_witness(const GammaParam& g, std::size_t m, std::size_t level) {
  if (m == 0) throw std::invalid_argument("m must be at least 1");
  AlgebraElement s = AlgebraElement::symmetry(level, m);
  s.values *= std::pow(g.value(), static_cast<double>(m - 1));
  return s;
}

DistanceResult connes_distance(const TruncatedTriple& t, const State& phi, const State& psi,
                               const ConnesOptions& options) {
  const std::size_t level = t.level();
  if (phi.level() != level || psi.level() != level) throw std::invalid_argument("state level mismatch");
  const Eigen::Index n = static_cast<Eigen::Index>(t.atom_count());
  const Eigen::VectorXd g = phi.weights() - psi.weights();

  DistanceResult out;
  out.upper_bound = marginal_upper_bound(t, phi, psi);
  const auto xa = phi.point_atom();
  const auto ya = psi.point_atom();
  if (t.spec().gamma() && xa && ya && *xa != *ya) {
    const double gamma = *t.spec().gamma();
    const int m = std::countr_zero(*xa ^ *ya) + 1;
    out.analytic_upper = 2.0 * std::pow(gamma, m - 1) / ((1.0 - gamma) * (1.0 - gamma)) / t.spec().scale();
    out.upper_bound = std::min(out.upper_bound, *out.analytic_upper);
  }
  if (g.lpNorm<Eigen::Infinity>() == 0.0) {
    out.witness = Eigen::VectorXd::Zero(n);
    return out;
  }

  std::vector<std::size_t> orbit(static_cast<std::size_t>(n));
  for (std::size_t x = 0; x < orbit.size(); ++x) orbit[x] = x;
  std::size_t count = orbit.size();
  if (options.use_symmetry) {
    orbit = invariant_orbits(phi.weights(), psi.weights(), level);
    count = *std::max_element(orbit.begin(), orbit.end()) + 1;
  }
  // Operator cells: the orbits when they are subtrees, single atoms otherwise.
  std::vector<std::size_t> cell = orbit;
  std::size_t cells = count;
  if (!subtree_aligned(orbit, count, level)) {
    for (std::size_t x = 0; x < cell.size(); ++x) cell[x] = x;
    cells = cell.size();
  }
  const CellOperator op = make_cell_operator(t, cell, cells);

  // Atom values of the variables, and the same restricted to cells.
  const Eigen::MatrixXd values = orbit_value_basis(orbit, count);
  Eigen::MatrixXd basis(n, values.cols());
  for (Eigen::Index x = 0; x < n; ++x) basis.row(x) = values.row(static_cast<Eigen::Index>(orbit[static_cast<std::size_t>(x)]));
  Eigen::MatrixXd map(static_cast<Eigen::Index>(cells), values.cols());
  for (Eigen::Index x = 0; x < n; ++x) map.row(static_cast<Eigen::Index>(op.cell[static_cast<std::size_t>(x)])) = basis.row(x);
  const CellSeminorm oracle(op, map);
  const Eigen::VectorXd h = basis.transpose() * g;

  std::vector<Eigen::VectorXd> starts;
  if (options.warm_start) {
    if (options.warm_start->size() != n) throw std::invalid_argument("warm start has the wrong dimension");
    starts.push_back(basis.transpose() * *options.warm_start);
  }
  for (std::size_t k = 1; k <= level; ++k) {
    starts.push_back(basis.transpose() * AlgebraElement::symmetry(level, k).real_values());
  }
  starts.push_back(h);

  const HyperplaneMinimum best = minimize_on_hyperplane(oracle, h, starts, options.minimizer);
  out.witness = basis * best.point / best.norm;
  out.value = g.dot(out.witness);
  if (out.value < 0.0) {
    out.witness = -out.witness;
    out.value = -out.value;
  }
  out.witness_norm = commutator_norm_real(t, out.witness);
  out.iterations = best.iterations;
  out.converged = best.converged;
  return out;
}

// ---------------------------------------------------------------------------
// Diameter

DiameterReport diameter_bound_check(const TruncatedTriple& t, std::size_t samples, std::uint64_t seed,
                                    std::size_t refined) {
  const std::size_t level = t.level();
  const std::vector<double> betas = beta_sequence(t.spec(), level);
  for (double b : betas) {
    if (!std::isfinite(b)) throw std::invalid_argument("the eigenvalue rule has an infinite beta_n");
  }
  std::vector<double> tail(level + 1, 0.0);  // tail[n] = sum_{j > n} beta_j
  for (std::size_t n = level; n-- > 0;) tail[n] = tail[n + 1] + betas[n];

  DiameterReport rep;
  rep.beta_sum = tail[0];
  const double tol = 1e-7;

  auto inspect = [&](const Eigen::VectorXd& a, double& slot) {
    const double osc = (a.array() - a.mean()).abs().maxCoeff();
    slot = std::max(slot, osc);
    if (osc > tail[0] + tol) rep.pass = false;
    for (std::size_t n = 1; n < level; ++n) {
      const double dev = (a - conditional_expectation(a, level, n)).cwiseAbs().maxCoeff();
      rep.worst_tail_ratio = std::max(rep.worst_tail_ratio, dev / tail[n]);
      if (dev > tail[n] + tol) rep.pass = false;
    }
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index n = static_cast<Eigen::Index>(t.atom_count());
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i) a[i] = normal(rng);
    const double norm = commutator_norm_real(t, a);
    if (norm == 0.0) continue;
    inspect(a / norm, rep.sampled_max);
    ++rep.samples;
  }
  for (std::size_t k = 1; k <= level; ++k) {
    const Eigen::VectorXd s = AlgebraElement::symmetry(level, k).real_values();
    inspect(s / commutator_norm_real(t, s), rep.sampled_max);
    ++rep.samples;
  }

  // Optimizer-refined elements: witnesses for d(chi_x, tau), and the
  // distances to cylinder averages against the tail sums.
  std::uniform_int_distribution<std::uint64_t> pick(0, t.atom_count() - 1);
  Eigen::VectorXd warm;
  for (std::size_t r = 0; r < refined; ++r) {
    const std::uint64_t atom = r == 0 ? 0 : pick(rng);
    const CantorPoint x = CantorPoint::from_index(atom, level);
    const DistanceResult d = connes_distance(t, State::point_index(atom, level), State::uniform(level));
    inspect(d.witness, rep.refined_max);
    for (std::size_t k = 1; k < level; ++k) {
      const DistanceResult dc = connes_distance(t, State::point_index(atom, level), State::cylinder(x, k, level));
      inspect(dc.witness, rep.refined_max);
      rep.worst_tail_ratio = std::max(rep.worst_tail_ratio, dc.value / tail[k]);
      if (dc.value > tail[k] + tol) rep.pass = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Brute force

double brute_force_oracle(const TruncatedTriple& t, const State& phi, const State& psi, int grid) {
  const std::size_t level = t.level();
  if (level > 2) throw std::invalid_argument("brute-force oracle supports N <= 2 only");
  if (phi.level() != level || psi.level() != level) throw std::invalid_argument("state level mismatch");
  if (grid < 2) throw std::invalid_argument("grid must have at least two points per axis");
  const Eigen::Index n = static_cast<Eigen::Index>(t.atom_count());
  const Eigen::VectorXd g = phi.weights() - psi.weights();

  // D in the atom basis from the conditional expectations P_k (averaging
  // over the coordinates above k), D = sum_k alpha_k (P_k - P_{k-1}).
  std::vector<Eigen::MatrixXd> p(level + 1);
  for (std::size_t k = 0; k <= level; ++k) {
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    const double share = 1.0 / static_cast<double>(std::uint64_t{1} << (level - k));
    p[k] = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if ((static_cast<std::uint64_t>(i) & mask) == (static_cast<std::uint64_t>(j) & mask)) p[k](i, j) = share;
      }
    }
  }
  Eigen::MatrixXd dirac = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 1; k <= level; ++k) dirac += t.alpha(k) * (p[k] - p[k - 1]);

  auto seminorm = [&](const Eigen::VectorXd& a) {
    const Eigen::MatrixXd c = dirac * a.asDiagonal() - a.asDiagonal() * dirac;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(c).singularValues()[0];
  };

  // Quotient by constants: orthonormal complement of 1 from a QR factorization.
  Eigen::MatrixXd seed(n, n);
  seed.col(0).setOnes();
  seed.rightCols(n - 1) = Eigen::MatrixXd::Identity(n, n).leftCols(n - 1);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();
  const Eigen::MatrixXd basis = q.rightCols(n - 1);

  auto ratio = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd a = basis * u;
    const double s = seminorm(a);
    return s > 0.0 ? std::abs(g.dot(a)) / s : 0.0;
  };

  if (n - 1 == 1) return ratio(Eigen::VectorXd::Ones(1));

  // Three quotient dimensions: search directions on the sphere, then refine
  // on successively smaller local grids.
  auto direction = [](double theta, double phi_angle) {
    Eigen::VectorXd u(3);
    u << std::sin(theta) * std::cos(phi_angle), std::sin(theta) * std::sin(phi_angle), std::cos(theta);
    return u;
  };
  const double pi = std::numbers::pi;
  double best = 0.0, bt = 0.0, bp = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double theta = pi * (i + 0.5) / grid;
    for (int j = 0; j < grid; ++j) {
      const double ph = 2.0 * pi * j / grid;
      const double r = ratio(direction(theta, ph));
      if (r > best) {
        best = r;
        bt = theta;
        bp = ph;
      }
    }
  }
  double width = 2.0 * pi / grid;
  const int local = 10;
  for (int round = 0; round < 60; ++round) {
    double nt = bt, np = bp;
    for (int i = -local; i <= local; ++i) {
      for (int j = -local; j <= local; ++j) {
        const double theta = bt + width * i / local;
        const double ph = bp + width * j / local;
        const double r = ratio(direction(theta, ph));
        if (r > best) {
          best = r;
          nt = theta;
          np = ph;
        }
      }
    }
    bt = nt;
    bp = np;
    width *= 0.5;
  }
  return best;
}

}  // namespace spectral_cantor
