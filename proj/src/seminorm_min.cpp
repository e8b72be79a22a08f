#include "spectral_cantor/seminorm_min.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectral_cantor {

Eigen::MatrixXd complement_basis(const Eigen::VectorXd& u) {
  const Eigen::Index d = u.size();
  if (d == 0) throw std::invalid_argument("empty vector");
  Eigen::VectorXd v = u;
  v[0] -= 1.0;
  const double vn = v.norm();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
  if (vn > 1e-300) {
    v /= vn;
    q -= 2.0 * v * v.transpose();
  }
  return q.rightCols(d - 1);
}

double log_sum_exp(const Eigen::VectorXd& x, double mu, Eigen::VectorXd* weights) {
  const double top = x.maxCoeff();
  const Eigen::ArrayXd e = ((x.array() - top) / mu).exp();
  const double total = e.sum();
  if (weights) *weights = e / total;
  return top + mu * std::log(total);
}

namespace {

struct Point {
  Eigen::VectorXd y;
  double f = 0.0;
  Eigen::VectorXd g;
  double exact = 0.0;
};

}  // namespace

HyperplaneMinimum minimize_on_hyperplane(const SeminormOracle& oracle, const Eigen::VectorXd& h,
                                         const std::vector<Eigen::VectorXd>& starts,
                                         const MinimizerOptions& options) {
  const Eigen::Index d = oracle.dimension();
  if (h.size() != d) throw std::invalid_argument("hyperplane normal has the wrong dimension");
  const double hn = h.norm();
  if (!(hn > 0.0)) throw std::invalid_argument("hyperplane normal is zero");

  HyperplaneMinimum best;
  best.norm = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const double hs = h.dot(s);
    if (s.size() != d || std::abs(hs) <= 1e-12 * hn * s.norm()) continue;
    const Eigen::VectorXd c = s / hs;
    const double p = oracle.norm(c);
    if (p < best.norm) {
      best.norm = p;
      best.point = c;
    }
  }
  if (!std::isfinite(best.norm)) throw std::invalid_argument("no usable starting point");
  if (d == 1 || best.norm == 0.0) {
    best.converged = true;
    return best;
  }

  // c = c0 + z y keeps h.c = 1.
  const Eigen::VectorXd c0 = h / (hn * hn);
  const Eigen::MatrixXd z = complement_basis(h / hn);
  const Eigen::Index r = z.cols();

  auto evaluate = [&](const Eigen::VectorXd& y, double mu) {
    Point p;
    p.y = y;
    Eigen::VectorXd gc;
    p.f = oracle.smoothed(c0 + z * y, mu, &gc, &p.exact);
    p.g = z.transpose() * gc;
    return p;
  };
  auto record = [&](const Point& p) {
    if (p.exact < best.norm) {
      best.norm = p.exact;
      best.point = c0 + z * p.y;
    }
  };

  Eigen::VectorXd y = z.transpose() * (best.point - c0);
  const double reference = best.norm;
  int iterations = 0;
  bool exhausted = false;

  for (std::size_t stage = 0; stage < options.smoothing.size() && !exhausted; ++stage) {
    const bool last = stage + 1 == options.smoothing.size();
    const double mu = options.smoothing[stage] * reference;
    Point cur = evaluate(y, mu);
    record(cur);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(r, r);
    bool fresh = true;
    int stall = 0;
    double certified = best.norm;

    while (true) {
      if (iterations >= options.max_iterations) {
        exhausted = true;
        break;
      }
      Eigen::VectorXd dir = -hinv * cur.g;
      double slope = cur.g.dot(dir);
      if (!(slope < 0.0)) {
        hinv.setIdentity();
        fresh = true;
        dir = -cur.g;
        slope = -cur.g.squaredNorm();
      }
      if (-slope <= 1e-15 * std::abs(cur.f)) break;

      double t = 1.0;
      Point next;
      bool accepted = false;
      for (int k = 0; k < 60; ++k, t *= 0.5) {
        next = evaluate(cur.y + t * dir, mu);
        if (next.f < cur.f && next.f <= cur.f + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
      }
      ++iterations;
      if (!accepted) {
        if (fresh) break;
        hinv.setIdentity();
        fresh = true;
        continue;
      }
      record(next);

      const Eigen::VectorXd s = next.y - cur.y;
      const Eigen::VectorXd yk = next.g - cur.g;
      const double sy = s.dot(yk);
      if (sy > 1e-12 * s.norm() * yk.norm()) {
        if (fresh) {
          hinv *= sy / yk.squaredNorm();
          fresh = false;
        }
        const double rho = 1.0 / sy;
        const Eigen::VectorXd hy = hinv * yk;
        hinv += (rho * rho * yk.dot(hy) + rho) * s * s.transpose() - rho * (hy * s.transpose() + s * hy.transpose());
      }

      const double improvement = (cur.f - next.f) / std::abs(cur.f);
      cur = std::move(next);
      if (last) {
        // Final stage: stop once the certified value stops moving.
        const double gain = (certified - best.norm) / certified;
        certified = best.norm;
        stall = gain < options.stall_tolerance ? stall + 1 : 0;
      } else {
        stall = improvement < options.stall_tolerance ? stall + 1 : 0;
      }
      if (stall >= options.stall_window) break;
    }
    y = z.transpose() * (best.point - c0);
  }

  best.iterations = iterations;
  best.converged = !exhausted;
  return best;
}

}  // namespace spectral_cantor
