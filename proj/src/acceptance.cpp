#include "spectral_cantor/acceptance.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "spectral_cantor/cantor_points.hpp"
#include "spectral_cantor/connes_distance.hpp"
#include "spectral_cantor/fractal_embed.hpp"
#include "spectral_cantor/gns_cantor.hpp"
#include "spectral_cantor/matrix_triple.hpp"
#include "spectral_cantor/summability.hpp"

namespace spectral_cantor {

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok) { pass = pass && ok; }
};

// Absolute rounding allowance for quantities of size <= 1 whose exact
// tolerance (a truncation tail) can fall below double resolution.
constexpr double kRounding = 16.0 * std::numeric_limits<double>::epsilon();

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CantorPoint random_point(std::mt19937_64& rng, std::size_t bits) {
  CantorPoint x;
  for (std::size_t n = 1; n <= bits; ++n) x.set_coordinate(n, static_cast<int>(rng() & 1U));
  return x;
}

// y agrees with x before a random m in [1, m_max], differs at m, random after.
std::pair<CantorPoint, std::size_t> partner(const CantorPoint& x, std::mt19937_64& rng, std::size_t m_max,
                                            std::size_t bits) {
  const std::size_t m = 1 + static_cast<std::size_t>(rng() % m_max);
  CantorPoint y = x;
  y.set_coordinate(m, 1 - x.coordinate(m));
  for (std::size_t n = m + 1; n <= bits; ++n) y.set_coordinate(n, static_cast<int>(rng() & 1U));
  return {y, m};
}

State random_state(std::mt19937_64& rng, std::size_t level) {
  std::exponential_distribution<double> ex;
  Eigen::VectorXd w(static_cast<Eigen::Index>(std::size_t{1} << level));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = ex(rng);
  return State::from_weights(w / w.sum());
}

const std::vector<double> kGammas{0.3, 0.5, 0.7, 0.9};

void walsh_norms(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t N = o.quick ? 6 : 10;
  double worst = 0.0;
  for (double g : kGammas) {
    const auto t = build_triple(N, DiracSpec::geometric(GammaParam(g)));
    for (std::size_t n = 1; n <= N; ++n) {
      const double v = commutator_norm(t, AlgebraElement::symmetry(N, n));
      worst = std::max(worst, rel_err(v, std::pow(g, 1.0 - static_cast<double>(n))));
    }
  }
  out.require(worst <= 1e-9);
  out.detail << "N=" << N << ", max relative error " << worst;
}

void distance_sandwich(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t N = o.quick ? 5 : 8;
  const std::uint64_t atoms = std::uint64_t{1} << N;
  std::mt19937_64 rng(o.seed);
  double worst_lower = 0.0, worst_upper = 0.0, worst_norm = 0.0, worst_direct = 0.0;
  for (double g : kGammas) {
    const auto t = build_triple(N, DiracSpec::geometric(GammaParam(g)));
    // d(x, y) = d(0, x xor y): translations commute with D.
    std::vector<DistanceResult> from_zero(atoms);
    for (std::uint64_t z = 1; z < atoms; ++z) {
      from_zero[z] = connes_distance(t, State::point_index(0, N), State::point_index(z, N));
    }
    for (std::uint64_t x = 0; x < atoms; ++x) {
      for (std::uint64_t y = x + 1; y < atoms; ++y) {
        const auto& r = from_zero[x ^ y];
        const double m = static_cast<double>(std::countr_zero(x ^ y) + 1);
        const double lower = 2.0 * std::pow(g, m - 1.0);
        const double upper = lower / ((1.0 - g) * (1.0 - g));
        worst_lower = std::max(worst_lower, (lower - r.value) / lower);
        worst_upper = std::max(worst_upper, r.upper_bound - upper);
        worst_norm = std::max(worst_norm, r.witness_norm - 1.0);
      }
    }
    for (int k = 0; k < 8; ++k) {
      const std::uint64_t x = rng() % atoms;
      std::uint64_t y = rng() % atoms;
      if (y == x) y ^= 1;
      const auto r = connes_distance(t, State::point_index(x, N), State::point_index(y, N));
      worst_direct = std::max(worst_direct, rel_err(r.value, from_zero[x ^ y].value));
    }
  }
  out.require(worst_lower <= 1e-12);
  out.require(worst_upper <= 1e-7);
  out.require(worst_norm <= 1e-9);
  out.require(worst_direct <= 1e-6);
  out.detail << "N=" << N << ", " << (atoms * (atoms - 1) / 2) << " pairs per gamma; lower slack " << worst_lower
             << ", upper excess " << worst_upper << ", witness norm excess " << worst_norm
             << ", direct-vs-translated " << worst_direct;
}

void oracle_equivalence(const AcceptanceOptions& o, Outcome& out) {
  std::mt19937_64 rng(o.seed + 3);
  const int random_pairs = o.quick ? 4 : 20;
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t N : {1, 2}) {
    for (double g : {0.3, 0.5, 0.7}) {
      const auto t = build_triple(N, DiracSpec::geometric(GammaParam(g)));
      const std::uint64_t atoms = std::uint64_t{1} << N;
      for (std::uint64_t x = 0; x < atoms; ++x) {
        for (std::uint64_t y = x + 1; y < atoms; ++y) {
          const auto p = State::point_index(x, N), q = State::point_index(y, N);
          worst = std::max(worst, std::abs(connes_distance(t, p, q).value - brute_force_oracle(t, p, q)));
          ++compared;
        }
      }
    }
    const auto t = build_triple(N, DiracSpec::geometric(GammaParam(0.5)));
    for (int k = 0; k < random_pairs; ++k) {
      const State p = random_state(rng, N), q = random_state(rng, N);
      worst = std::max(worst, std::abs(connes_distance(t, p, q).value - brute_force_oracle(t, p, q)));
      ++compared;
    }
  }
  out.require(worst <= 1e-4);
  out.detail << compared << " pairs, max |solver - grid oracle| " << worst;
}

void diameter(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t N = o.quick ? 6 : 8;
  const auto t = build_triple(N, DiracSpec::geometric(GammaParam(0.5)));
  const auto r = diameter_bound_check(t, o.quick ? 200 : 2000, o.seed + 4, o.quick ? 2 : 6);
  const double sup = std::max(r.sampled_max, r.refined_max);
  out.require(r.pass);
  out.require(sup <= 4.0 + 1e-7);
  out.detail << "N=" << N << ", sup " << sup << " (refined " << r.refined_max << "), beta sum " << r.beta_sum
             << ", worst tail ratio " << r.worst_tail_ratio;
}

void trace_closed_form(const AcceptanceOptions&, Outcome& out) {
  double worst = 0.0, worst_threshold = 0.0, above_ratio = 0.0;
  bool flags = true;
  const auto mult = cantor_multiplicity();
  for (double g : kGammas) {
    const GammaParam gp(g);
    const auto spec = DiracSpec::geometric(gp);
    const double thr = summability_threshold(gp);
    for (double s : {0.5 * thr, thr, 1.01 * thr, 2.0 * thr}) {
      for (std::size_t k = 1; k <= 200; ++k) {
        worst = std::max(worst, rel_err(trace_power(spec, mult, s, k).partial_sum, trace_power_closed_form(gp, s, k)));
      }
    }
    const auto at = trace_power(spec, mult, thr, 200);
    const auto above = trace_power(spec, mult, 1.01 * thr, 200);
    worst_threshold = std::max(worst_threshold, std::abs(at.term_ratio - 1.0));
    above_ratio = std::max(above_ratio, above.term_ratio);
    flags = flags && at.divergent && !above.divergent;
  }
  out.require(worst <= 1e-12);
  out.require(worst_threshold <= 1e-12);
  out.require(above_ratio < 1.0);
  out.require(flags);
  out.detail << "max relative error " << worst << ", |ratio - 1| at threshold " << worst_threshold
             << ", ratio above threshold " << above_ratio;
}

void resolvent_bound(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t horizon = o.quick ? 10000 : 100000;
  std::vector<double> dims(horizon);
  for (std::size_t n = 1; n <= horizon; ++n) dims[n - 1] = static_cast<double>(n + 1);
  const auto mult = af_recipe_multiplicity(dims);
  double worst = 0.0;
  for (double p : {0.5, 1.0, 2.0}) {
    worst = std::max(worst, trace_resolvent(af_recipe_spec(p, dims), mult, p, horizon).partial_sum);
  }
  out.require(worst <= 2.0);
  out.detail << "horizon " << horizon << ", largest partial sum " << worst;
}

void isometry(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t L = 40, bits = 64;
  const int pairs = o.quick ? 1000 : 10000;
  std::mt19937_64 rng(o.seed + 7);
  double worst_l1 = 0.0;
  bool sup_exact = true, chain = true;
  for (double g : {0.3, 1.0 / 3.0, 0.5, 0.7, 0.9}) {
    const GammaParam gp(g);
    for (int k = 0; k < pairs; ++k) {
      const CantorPoint x = random_point(rng, bits);
      const auto [y, m] = partner(x, rng, L, bits);
      const Eigen::VectorXd d = embed_f_gamma(x.truncated(L), gp, L) - embed_f_gamma(y.truncated(L), gp, L);
      const double l1 = d.lpNorm<1>(), l2 = d.norm(), linf = d.lpNorm<Eigen::Infinity>();
      worst_l1 = std::max(worst_l1, std::abs(l1 - delta_gamma(x, y, gp)) / (2.0 * std::pow(g, static_cast<double>(L)) + kRounding));
      sup_exact = sup_exact && linf == std::pow(g, static_cast<double>(m - 1)) * (1.0 - g);
      chain = chain && linf <= l2 && l2 <= l1;
    }
  }
  out.require(worst_l1 <= 1.0);
  out.require(sup_exact && chain);
  out.detail << "L=" << L << ", worst |l1 - delta| / (2 gamma^L + rounding) " << worst_l1 << ", sup gap exact: " << (sup_exact ? "yes" : "no")
             << ", norm chain: " << (chain ? "yes" : "no");
}

// True when r has a base-3 expansion with digits in {0, 2} to the given
// depth; a digit is read as 0 below 1 + tol and as 2 above 2 - tol, so the
// tie 0.0222... = 0.1 resolves to the admissible form.
bool ternary_digits_ok(double r, int depth) {
  constexpr double tol = 1e-7;
  for (int i = 0; i < depth; ++i) {
    r *= 3.0;
    if (r <= 1.0 + tol) {
      r = std::max(0.0, std::min(r, 1.0));
    } else if (r >= 2.0 - tol) {
      r = std::max(0.0, std::min(r - 2.0, 1.0));
    } else {
      return false;
    }
  }
  return true;
}

void bi_lipschitz(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t L = 48, bits = 64;
  const int pairs = o.quick ? 1000 : 10000;
  std::mt19937_64 rng(o.seed + 8);
  double worst = -1e300;  // largest excess over a bound, relative to the allowance
  bool digits = true;
  for (double g : {0.3, 1.0 / 3.0, 0.5, 0.7, 0.9}) {
    const GammaParam gp(g);
    const auto c = F_gamma_constants(gp);
    const double slack = std::pow(g, static_cast<double>(L)) / (1.0 - g);
    const bool ternary = std::abs(g - 1.0 / 3.0) < 1e-15;
    for (int k = 0; k < pairs; ++k) {
      const CantorPoint x = random_point(rng, bits);
      const CantorPoint y = partner(x, rng, L, bits).first;
      const Eigen::VectorXd fx = embed_F_gamma(x.truncated(L), gp, L);
      const Eigen::VectorXd fy = embed_F_gamma(y.truncated(L), gp, L);
      const double dist = (fx - fy).norm();
      const double delta = delta_gamma(x, y, gp);
      worst = std::max(worst, (c.lower * delta - dist) / (slack + kRounding));
      worst = std::max(worst, (dist - c.upper * delta) / (slack + kRounding));
      if (ternary) digits = digits && ternary_digits_ok(fx[0], 15) && ternary_digits_ok(fy[0], 15);
    }
  }
  out.require(worst <= 1.0);
  out.require(digits);
  out.detail << "L=" << L << ", worst excess / (slack + rounding) " << worst << ", base-3 digits in {0,2}: " << (digits ? "yes" : "no");
}

void dimension(const AcceptanceOptions&, Outcome& out) {
  const std::size_t L = 14;
  double worst_intervals = 0.0, worst_grid = 0.0;
  for (double g : {1.0 / 3.0, 0.5, 0.7}) {
    const GammaParam gp(g);
    const auto cloud = cantor_cloud_f(gp, L);
    std::vector<double> exact, grid;
    for (std::size_t n = 0; n < L; ++n) exact.push_back(std::pow(g, static_cast<double>(n)));
    // Box sides between consecutive coordinate weights.
    for (int j = -1; j <= static_cast<int>(L) - 2; ++j) grid.push_back(std::pow(g, j + 0.5) * (1.0 - g));
    const double t = gp.dimension();
    worst_intervals = std::max(worst_intervals, std::abs(box_dimension(cloud, exact, BoxMethod::intervals).slope - t));
    worst_grid = std::max(worst_grid, rel_err(box_dimension(cloud, grid, BoxMethod::grid).slope, t));
  }
  out.require(worst_intervals <= 1e-9);
  out.require(worst_grid <= 0.05);
  out.detail << "L=" << L << ", interval error " << worst_intervals << ", grid relative error " << worst_grid;
}

void hausdorff(const AcceptanceOptions&, Outcome& out) {
  double worst = 0.0;
  bool ordered = true;
  for (double g : {0.05, 0.1, 0.2, 0.3, 1.0 / 3.0, 0.5, 0.7, 0.9, 0.95, 0.99}) {
    const GammaParam gp(g);
    for (std::size_t n = 1; n <= 40; ++n) {
      const auto b = hausdorff_bounds(gp, n);
      worst = std::max(worst, std::abs(b.cover_sum - 1.0));
      ordered = ordered && b.lower < b.upper && b.lower > 0.0;
    }
  }
  out.require(worst <= 1e-12);
  out.require(ordered);
  out.detail << "max |cover sum - 1| " << worst << ", lower < upper: " << (ordered ? "yes" : "no");
}

void gromov_hausdorff(const AcceptanceOptions&, Outcome& out) {
  const std::size_t L = 12;
  double worst = -1e300;
  for (int i = 1; i <= 20; ++i) {
    for (int j = 1; j <= 20; ++j) {
      const double a = i / 21.0, b = j / 21.0;
      const double hi = std::max(a, b);
      const double bound = gh_upper_bound(GammaParam(a), GammaParam(b)) + 2.0 * std::pow(hi, static_cast<double>(L));
      worst = std::max(worst, gh_correspondence_distance(GammaParam(a), GammaParam(b), L) - bound);
    }
  }
  out.require(worst <= 0.0);
  out.detail << "400 pairs, max (distance - bound) " << worst;
}

void matrix_triple(const AcceptanceOptions& o, Outcome& out) {
  const int count = o.quick ? 100 : 1000;
  std::mt19937_64 rng(o.seed + 12);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (Eigen::Index n = 2; n <= 8; ++n) {
    for (int k = 0; k < count; ++k) {
      Eigen::MatrixXcd a(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const double re = normal(rng);
          a(i, j) = {re, normal(rng)};
        }
      }
      a = (0.5 * (a + a.adjoint())).eval();
      worst = std::max(worst, std::abs(flip_commutator_norm(a) - spread_half(a)));
    }
  }
  const auto r = verify_unithm(8, 20, o.seed + 13);
  out.require(worst <= 1e-9);
  out.require(r.max_deviation < 1e-7);
  out.detail << "max |flip - spread/2| " << worst << ", n=8 state-norm deviation " << r.max_deviation;
}

void monotone_truncation(const AcceptanceOptions& o, Outcome& out) {
  const std::size_t top = o.quick ? 5 : 8;
  const GammaParam g(0.5);
  double worst = -1e300;
  std::size_t pairs = 0;
  auto previous = build_triple(2, DiracSpec::geometric(g));
  for (std::size_t N = 2; N <= top; ++N) {
    const auto next = build_triple(N + 1, DiracSpec::geometric(g));
    // Pairs (0, z); every point pair is a translate of one of these.
    for (std::uint64_t z = 1; z < (std::uint64_t{1} << N); ++z) {
      const double coarse = connes_distance(previous, State::point_index(0, N), State::point_index(z, N)).value;
      const double fine = connes_distance(next, State::point_index(0, N + 1), State::point_index(z, N + 1)).value;
      worst = std::max(worst, coarse - fine);
      ++pairs;
    }
    previous = next;
  }
  out.require(worst <= 1e-8);
  out.detail << "N=2.." << top << ", " << pairs << " pairs, max (d_N - d_{N+1}) " << worst;
}

struct Entry {
  const char* name;
  double budget;
  void (*run)(const AcceptanceOptions&, Outcome&);
};

const Entry kEntries[] = {
    {"commutator norms of the Walsh symmetries", 10.0, walsh_norms},
    {"point-state distance sandwich", 300.0, distance_sandwich},
    {"solver agrees with grid oracle", 120.0, oracle_equivalence},
    {"diameter bound", 120.0, diameter},
    {"trace closed form and threshold", 1.0, trace_closed_form},
    {"resolvent partial sums", 5.0, resolvent_bound},
    {"f_gamma isometry and norm chain", 10.0, isometry},
    {"F_gamma bi-Lipschitz sandwich", 30.0, bi_lipschitz},
    {"box-counting dimension", 60.0, dimension},
    {"Hausdorff cover identity", 1.0, hausdorff},
    {"Gromov-Hausdorff bound", 120.0, gromov_hausdorff},
    {"flip triple and state norm", 60.0, matrix_triple},
    {"monotone truncation", 180.0, monotone_truncation},
};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > static_cast<int>(std::size(kEntries))) throw std::out_of_range("criterion id must be 1..13");
  const Entry& e = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = e.name;
  r.budget_seconds = e.budget;
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    e.run(options, out);
  } catch (const std::exception& ex) {
    out.pass = false;
    out.detail << "exception: " << ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.pass = out.pass && r.seconds <= r.budget_seconds;
  r.detail = out.detail.str();
  if (r.seconds > r.budget_seconds) r.detail += "; over the time budget";
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  for (int id = 1; id <= static_cast<int>(std::size(kEntries)); ++id) results.push_back(run_criterion(id, options));
  return results;
}

}  // namespace spectral_cantor
