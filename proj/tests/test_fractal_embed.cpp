#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spectral_cantor/fractal_embed.hpp"

using namespace spectral_cantor;

namespace {

std::vector<double> powers(double g, int from, int to) {
  std::vector<double> s;
  for (int n = from; n <= to; ++n) s.push_back(std::pow(g, n));
  return s;
}

// x * 3^digits must be an integer whose base-3 digits are all 0 or 2.
bool ternary_02(double x, int digits) {
  const double scaled = x * std::pow(3.0, digits);
  const double k = std::round(scaled);
  if (std::abs(scaled - k) > 1e-6) return false;
  for (auto n = static_cast<std::uint64_t>(k); n > 0; n /= 3) {
    if (n % 3 == 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("f_gamma is an isometry onto its image") {
  std::mt19937_64 rng(21);
  for (double g : {0.2, 0.5, 0.85}) {
    const GammaParam gp(g);
    for (int i = 0; i < 200; ++i) {
      const auto x = CantorPoint::from_index(rng() & 0xFFF, 12), y = CantorPoint::from_index(rng() & 0xFFF, 12);
      const double l1 = (embed_f_gamma(x, gp, 12) - embed_f_gamma(y, gp, 12)).lpNorm<1>();
      CHECK(l1 == doctest::Approx(delta_gamma(x, y, gp)).epsilon(1e-13));
    }
  }
  CHECK(embed_f_gamma(CantorPoint{}, GammaParam(0.4), 6).isZero());
  const auto v = embed_f_gamma(CantorPoint::parse("1000"), GammaParam(0.5), 4);
  CHECK(v[0] == 0.5);
  CHECK(v.tail(3).isZero());
  CHECK_THROWS_AS(embed_f_gamma(CantorPoint::parse("0001"), GammaParam(0.5), 3), std::invalid_argument);
}

TEST_CASE("e_gamma") {
  CHECK(e_gamma(GammaParam(0.8)) == 4);
  CHECK(e_gamma(GammaParam(1.0 / 3.0)) == 1);
  CHECK(e_gamma(GammaParam(0.6)) == 2);
  for (int k = 1; k <= 6; ++k) CHECK(e_gamma(GammaParam(std::pow(2.0, -1.0 / k))) == static_cast<std::size_t>(k + 1));
}

TEST_CASE("F_gamma") {
  CHECK(embed_F_gamma(CantorPoint{}, GammaParam(0.7), 10).isZero());
  // Middle-thirds Cantor set: ternary digits 0 and 2 only.
  std::mt19937_64 rng(22);
  for (int i = 0; i < 500; ++i) {
    const auto x = CantorPoint::from_index(rng() & 0xFFFFF, 20);
    const auto F = embed_F_gamma(x, GammaParam(1.0 / 3.0), 20);
    REQUIRE(F.size() == 1);
    CHECK(ternary_02(F[0], 20));
  }
  CHECK_FALSE(ternary_02(0.5, 20));
  for (double g : {1.0 / 3.0, 0.6, 0.8}) {
    const GammaParam gp(g);
    const auto c = F_gamma_constants(gp);
    const double e = static_cast<double>(e_gamma(gp));
    CHECK(c.lower == doctest::Approx((1.0 - 2.0 * std::pow(g, e)) * g));
    CHECK(c.upper == doctest::Approx(std::pow(g, 1.0 - e) / (1.0 - g)));
    for (int i = 0; i < 300; ++i) {
      const auto x = CantorPoint::from_index(rng() & 0xFFFF, 16), y = CantorPoint::from_index(rng() & 0xFFFF, 16);
      const double d = delta_gamma(x, y, gp);
      const double F = (embed_F_gamma(x, gp, 16) - embed_F_gamma(y, gp, 16)).norm();
      CHECK(F >= c.lower * d - 1e-12);
      CHECK(F <= c.upper * d + 1e-12);
    }
  }
}

TEST_CASE("box-counting dimension") {
  const GammaParam third(1.0 / 3.0);
  const auto cloud = cantor_cloud_F(third, 20);
  CHECK(cloud.points.size() == (1U << 20));
  const auto est = box_dimension(cloud, powers(1.0 / 3.0, 2, 12));
  CHECK(est.method == BoxMethod::intervals);
  CHECK(std::abs(est.slope - std::log(2.0) / std::log(3.0)) <= 1e-9);
  CHECK(est.residual <= 1e-9);
  for (std::size_t i = 0; i < est.counts.size(); ++i) CHECK(est.counts[i] == std::ldexp(1.0, static_cast<int>(i) + 2));

  const auto half = cantor_cloud_f(GammaParam(0.5), 12);
  CHECK(std::abs(box_dimension(half, powers(0.5, 1, 10)).slope - 1.0) <= 1e-9);

  // Grid counting on f_gamma at the scales gamma^(j + 1/2) (1 - gamma) sees 2^(j+1) boxes.
  const double g = 0.7;
  const auto f = cantor_cloud_f(GammaParam(g), 14);
  std::vector<double> grid_scales;
  for (int j = -1; j <= 12; ++j) grid_scales.push_back(std::pow(g, j + 0.5) * (1.0 - g));
  const auto grid = box_dimension(f, grid_scales, BoxMethod::grid);
  CHECK(std::abs(grid.slope - GammaParam(g).dimension()) <= 1e-9);

  EmbeddedCloud single;
  single.points.push_back(Eigen::VectorXd::Constant(3, 0.25));
  CHECK(box_dimension(single, powers(0.5, 0, 10)).slope == 0.0);

  CHECK_THROWS_AS(box_dimension(half, powers(0.5, 1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(half, powers(0.5, 1, 5)), std::invalid_argument);  // 1.2 decades
  CHECK_THROWS_AS(box_dimension(single, powers(0.5, 0, 10), BoxMethod::intervals), std::invalid_argument);
  CHECK_THROWS_AS(box_dimension(EmbeddedCloud{}, powers(0.5, 0, 10)), std::invalid_argument);
  CHECK_THROWS_AS(cantor_cloud_f(GammaParam(0.5), 23), std::length_error);
}

TEST_CASE("Hausdorff measure bounds") {
  const auto b = hausdorff_bounds(GammaParam(1.0 / 3.0), 5);
  CHECK(b.lower == doctest::Approx(0.7743).epsilon(1e-4));
  CHECK(b.upper == 1.0);
  for (std::size_t n : {1U, 7U, 30U}) CHECK(hausdorff_bounds(GammaParam(0.6), n).cover_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hausdorff_bounds(GammaParam(1e-9), 3).lower == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(hausdorff_bounds(GammaParam(0.5), 0), std::invalid_argument);
}

TEST_CASE("Gromov-Hausdorff bounds") {
  CHECK(gh_upper_bound(GammaParam(0.5), GammaParam(0.25)) == doctest::Approx(1.0));
  CHECK(gh_upper_bound(GammaParam(0.25), GammaParam(0.5)) == doctest::Approx(1.0));
  CHECK(gh_upper_bound(GammaParam(0.9), GammaParam(0.1)) == doctest::Approx(16.0));
  CHECK(gh_upper_bound(GammaParam(0.4), GammaParam(0.4)) == 0.0);
  CHECK(gh_correspondence_distance(GammaParam(0.4), GammaParam(0.4), 10) == 0.0);
  CHECK(gh_correspondence_distance(GammaParam(0.5), GammaParam(0.25), 12) <= 1.0 + std::ldexp(1.0, -11));

  for (auto [g, m] : {std::pair{0.5, 0.25}, {0.9, 0.1}, {0.7, 0.6}, {0.3, 0.05}}) {
    const GammaParam gp(g), mp(m);
    for (std::size_t L : {1U, 5U, 12U}) {
      // The all-ones pattern on the coordinates where gamma's weight dominates:
      // sum_n |gap(n-1) - gap(n)| with gap(n) = gamma^n - mu^n and gap(0) = 0.
      auto gap = [&](std::size_t n) { return std::pow(g, static_cast<double>(n)) - std::pow(m, static_cast<double>(n)); };
      double tv = 0.0, peak = 0.0;
      for (std::size_t n = 1; n <= L; ++n) {
        tv += std::abs(gap(n - 1) - gap(n));
        peak = std::max(peak, gap(n));
      }
      const double value = gh_correspondence_distance(gp, mp, L);
      CHECK(std::abs(value - std::max(g - m, tv)) <= 1e-12);
      // Differs from the infinite-level form max(gamma - mu, 2 max gap) by at most the tail gap(L).
      CHECK(std::abs(value - std::max(g - m, 2.0 * peak)) <= gap(L) + 1e-12);
      CHECK(value <= gh_upper_bound(gp, mp) + 2.0 * std::pow(g, static_cast<double>(L)));
    }
  }
  CHECK_THROWS_AS(gh_correspondence_distance(GammaParam(0.5), GammaParam(0.2), 25), std::length_error);
}

TEST_CASE("universal space membership") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  v[0] = 0.25;
  auto r = universal_space_membership(v);
  CHECK(r.kind == Membership::scaled_cantor);
  REQUIRE(r.gamma);
  CHECK(*r.gamma == doctest::Approx(0.5).epsilon(1e-12));

  Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
  bad[1] = 0.45;
  CHECK(universal_space_membership(bad).kind == Membership::outside);

  CHECK(universal_space_membership(Eigen::VectorXd::Zero(5)).kind == Membership::scaled_cantor);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(5);
  e1[0] = 1.0;
  CHECK(universal_space_membership(e1).kind == Membership::e1);

  Eigen::VectorXd neg = Eigen::VectorXd::Zero(3);
  neg[2] = -0.1;
  CHECK(universal_space_membership(neg).kind == Membership::outside);

  // Inside the envelope but not a scaled Cantor point: ratios disagree.
  Eigen::VectorXd odd(3);
  odd << 0.1, 0.05, 0.04;
  CHECK(universal_space_membership(odd).kind == Membership::outside);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 100; ++i) {
    const double g = u(rng);
    const auto x = CantorPoint::from_index((rng() & 0x3FF) | 1U, 10);
    const Eigen::VectorXd w = (1.0 - g) * embed_f_gamma(x, GammaParam(g), 10);
    const auto got = universal_space_membership(w, 1e-12);
    REQUIRE(got.kind == Membership::scaled_cantor);
    if (x.truncated(10).to_string(10).find('1', 1) != std::string::npos) {
      // Two nonzero coordinates pin gamma down uniquely.
      CHECK(*got.gamma == doctest::Approx(g).epsilon(1e-9));
      CHECK(*got.bits == x);
    }
    CHECK(got.residual <= 1e-11);
  }
}
