#include "spectral_cantor/fractal_embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace spectral_cantor {

namespace {

void require_support(const CantorPoint& x, std::size_t L) {
  if (x.highest_set() > L) {
    throw std::invalid_argument("point " + x.to_string() + " has a nonzero coordinate past L = " + std::to_string(L));
  }
}

// Least n >= 0 with gamma^n <= eps.
std::size_t interval_level(double gamma, double eps) {
  std::size_t n = 0;
  double d = 1.0;
  while (d > eps * (1.0 + 1e-12)) {
    d *= gamma;
    ++n;
    if (n > 4096) throw std::invalid_argument("scale too small for interval counting");
  }
  return n;
}

struct VectorHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (std::int64_t x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
    return h;
  }
};

}  // namespace

std::string to_string(NormTag tag) {
  switch (tag) {
    case NormTag::l1: return "l1";
    case NormTag::l2: return "l2";
    case NormTag::linf: return "linf";
    case NormTag::e_max: return "E-max";
  }
  return "unknown";
}

double cloud_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, NormTag tag) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  const Eigen::VectorXd d = a - b;
  switch (tag) {
    case NormTag::l1: return d.lpNorm<1>();
    case NormTag::l2: return d.norm();
    case NormTag::linf: return d.size() ? d.lpNorm<Eigen::Infinity>() : 0.0;
    case NormTag::e_max:
      if (d.size() == 0) return 0.0;
      return std::max(std::abs(d[0]), d.tail(d.size() - 1).lpNorm<1>());
  }
  return 0.0;
}

Eigen::VectorXd embed_f_gamma(const CantorPoint& x, const GammaParam& g, std::size_t L) {
  require_support(x, L);
  const double gamma = g.value();
  Eigen::VectorXd v(static_cast<Eigen::Index>(L));
  for (std::size_t n = 1; n <= L; ++n) {
    v[static_cast<Eigen::Index>(n - 1)] = x.coordinate(n) ? std::pow(gamma, static_cast<double>(n - 1)) * (1.0 - gamma) : 0.0;
  }
  return v;
}

std::size_t e_gamma(const GammaParam& g) {
  const double t = g.dimension();
  const double r = std::round(t);
  const double base = std::abs(t - r) <= 1e-12 ? r : std::floor(t);
  return static_cast<std::size_t>(base) + 1;
}

Eigen::VectorXd embed_F_gamma(const CantorPoint& x, const GammaParam& g, std::size_t L) {
  require_support(x, L);
  const std::size_t e = e_gamma(g);
  const double ge = std::pow(g.value(), static_cast<double>(e));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e));
  for (std::size_t i = 1; i <= e; ++i) {
    // Smallest terms first.
    const std::size_t blocks = L >= i ? (L - i) / e + 1 : 0;
    double sum = 0.0;
    for (std::size_t p = blocks; p >= 1; --p) {
      if (x.coordinate(i + (p - 1) * e)) sum += std::pow(ge, static_cast<double>(p - 1));
    }
    v[static_cast<Eigen::Index>(i - 1)] = sum * (1.0 - ge);
  }
  return v;
}

LipschitzPair F_gamma_constants(const GammaParam& g) {
  const double gamma = g.value();
  const double e = static_cast<double>(e_gamma(g));
  return {(1.0 - 2.0 * std::pow(gamma, e)) * gamma, std::pow(gamma, 1.0 - e) / (1.0 - gamma)};
}

namespace {

EmbeddedCloud cantor_cloud(const GammaParam& g, std::size_t L, bool flat) {
  if (L > 22) throw std::length_error("clouds are limited to L <= 22 (2^L points)");
  EmbeddedCloud c;
  c.norm = flat ? NormTag::l1 : NormTag::l2;
  c.gamma = g.value();
  c.level = L;
  const std::uint64_t count = std::uint64_t{1} << L;
  c.points.reserve(count);
  c.sources.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    c.sources.push_back(CantorPoint::from_index(i, L));
    c.points.push_back(flat ? embed_f_gamma(c.sources.back(), g, L) : embed_F_gamma(c.sources.back(), g, L));
  }
  return c;
}

}  // namespace

EmbeddedCloud cantor_cloud_f(const GammaParam& g, std::size_t L) { return cantor_cloud(g, L, true); }
EmbeddedCloud cantor_cloud_F(const GammaParam& g, std::size_t L) { return cantor_cloud(g, L, false); }

DimensionEstimate box_dimension(const EmbeddedCloud& cloud, const std::vector<double>& scales, BoxMethod method,
                                double min_decades) {
  if (scales.size() < 4) throw std::invalid_argument("box counting needs at least 4 scales");
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("scales must be positive");
  }
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  if (std::log10(*hi / *lo) < min_decades - 1e-12) {
    throw std::invalid_argument("scales span less than the required " + std::to_string(min_decades) + " decades");
  }
  if (cloud.points.empty()) throw std::invalid_argument("empty cloud");
  if (method == BoxMethod::automatic) method = cloud.sources.empty() ? BoxMethod::grid : BoxMethod::intervals;
  if (method == BoxMethod::intervals && cloud.sources.empty()) {
    throw std::invalid_argument("interval counting needs Cantor sources");
  }

  DimensionEstimate est;
  est.method = method;
  est.scales = scales;
  for (double eps : scales) {
    std::size_t count = 0;
    if (method == BoxMethod::intervals) {
      const std::size_t n = interval_level(cloud.gamma, eps);
      if (n <= 64) {
        std::unordered_set<std::uint64_t> prefixes;
        for (const auto& x : cloud.sources) prefixes.insert(x.truncated(n).atom_index(n));
        count = prefixes.size();
      } else {
        std::set<std::string> prefixes;
        for (const auto& x : cloud.sources) prefixes.insert(x.truncated(n).to_string(n));
        count = prefixes.size();
      }
    } else {
      std::unordered_set<std::vector<std::int64_t>, VectorHash> boxes;
      for (const auto& p : cloud.points) {
        std::vector<std::int64_t> key(static_cast<std::size_t>(p.size()));
        for (Eigen::Index i = 0; i < p.size(); ++i) key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(p[i] / eps));
        boxes.insert(std::move(key));
      }
      count = boxes.size();
    }
    est.counts.push_back(static_cast<double>(count));
  }

  const std::size_t m = scales.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = -std::log(scales[i]);
    ys[i] = std::log(est.counts[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("scales must not all be equal");
  est.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (my + est.slope * (xs[i] - mx));
    rss += r * r;
  }
  est.residual = std::sqrt(rss / static_cast<double>(m));
  return est;
}

HausdorffBounds hausdorff_bounds(const GammaParam& g, std::size_t n) {
  if (n == 0) throw std::invalid_argument("cover level must be at least 1");
  HausdorffBounds b;
  b.dimension = g.dimension();
  b.lower = std::pow(1.0 - g.value(), b.dimension);
  b.upper = 1.0;
  b.cover_sum = cover_sum(n, b.dimension, g);
  return b;
}

double gh_upper_bound(const GammaParam& gamma, const GammaParam& mu) {
  const double g = std::max(gamma.value(), mu.value());
  const double m = std::min(gamma.value(), mu.value());
  return 2.0 * (g - m) / (1.0 - g);
}

double gh_correspondence_distance(const GammaParam& gamma, const GammaParam& mu, std::size_t L) {
  if (L == 0) throw std::invalid_argument("L must be at least 1");
  if (L > 24) throw std::length_error("correspondence enumeration is limited to L <= 24");
  const double g = gamma.value();
  const double m = mu.value();
  // Coordinate n of f_gamma(x) - f_mu(x) is x(n) w_n.
  std::vector<double> w(L);
  for (std::size_t n = 1; n <= L; ++n) {
    const double k = static_cast<double>(n - 1);
    w[n - 1] = std::abs(std::pow(g, k) * (1.0 - g) - std::pow(m, k) * (1.0 - m));
  }
  double worst = 0.0;
  const std::uint64_t count = std::uint64_t{1} << L;
  for (std::uint64_t x = 0; x < count; ++x) {
    double l1 = 0.0;
    for (std::size_t n = 0; n < L; ++n) {
      if ((x >> n) & 1U) l1 += w[n];
    }
    worst = std::max(worst, std::max(std::abs(g - m), l1));
  }
  return worst;
}

namespace {

// (1 - gamma)^2 gamma^k, the value of coordinate k+1 of (1 - gamma) f_gamma(x) when x(k+1) = 1.
double scaled_weight(double gamma, std::size_t k) {
  return (1.0 - gamma) * (1.0 - gamma) * std::pow(gamma, static_cast<double>(k));
}

std::vector<double> single_coordinate_roots(double t, std::size_t k) {
  if (k == 0) {
    const double gamma = 1.0 - std::sqrt(t);
    return gamma > 0.0 && gamma < 1.0 ? std::vector<double>{gamma} : std::vector<double>{};
  }
  // (1 - g)^2 g^k increases on (0, k/(k+2)) and decreases on (k/(k+2), 1).
  const double peak = static_cast<double>(k) / static_cast<double>(k + 2);
  if (t > scaled_weight(peak, k)) return {};
  auto bisect = [&](double a, double b, bool increasing) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      const bool below = scaled_weight(mid, k) < t;
      if (below == increasing) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };
  return {bisect(0.0, peak, true), bisect(peak, 1.0, false)};
}

}  // namespace

MembershipVerdict universal_space_membership(const Eigen::VectorXd& v, double tol) {
  MembershipVerdict out;
  if (!v.allFinite()) {
    out.reason = "non-finite coordinate";
    return out;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double cap = 4.0 / ((n + 1.0) * (n + 1.0));
    if (v[i] < -tol || v[i] > cap + tol) {
      out.reason = "coordinate " + std::to_string(i + 1) + " violates the envelope 0 <= v(n) <= 4/(n+1)^2";
      return out;
    }
  }
  if (v.size() > 0) {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(v.size());
    e1[0] = 1.0;
    const double d = (v - e1).lpNorm<1>();
    if (d <= tol) {
      out.kind = Membership::e1;
      out.residual = d;
      out.reason = "within tolerance of e_1";
      return out;
    }
  }
  const double mass = v.lpNorm<1>();
  if (mass <= tol) {
    out.kind = Membership::scaled_cantor;
    out.bits = CantorPoint{};
    out.residual = mass;
    out.reason = "zero lies in every scaled Cantor set";
    return out;
  }

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > tol) support.push_back(i);
  }
  std::vector<double> candidates;
  if (support.size() >= 2) {
    const double ratio = v[support[1]] / v[support[0]];
    const double gamma = std::pow(ratio, 1.0 / static_cast<double>(support[1] - support[0]));
    if (gamma > 0.0 && gamma < 1.0) candidates.push_back(gamma);
  } else if (support.size() == 1) {
    candidates = single_coordinate_roots(v[support[0]], static_cast<std::size_t>(support[0]));
  }

  for (double gamma : candidates) {
    CantorPoint x;
    double residual = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double w = scaled_weight(gamma, static_cast<std::size_t>(i));
      const int bit = std::abs(v[i] - w) < std::abs(v[i]) ? 1 : 0;
      if (bit) x.set_coordinate(static_cast<std::size_t>(i + 1), 1);
      residual += std::abs(v[i] - bit * w);
    }
    if (residual <= tol * std::max(1.0, static_cast<double>(v.size()))) {
      out.kind = Membership::scaled_cantor;
      out.gamma = gamma;
      out.bits = x;
      out.residual = residual;
      out.reason = "matches (1 - gamma) f_gamma(x)";
      return out;
    }
  }
  out.reason = candidates.empty() ? "no admissible gamma" : "coordinates do not follow a scaled Cantor pattern";
  return out;
}

}  // namespace spectral_cantor
