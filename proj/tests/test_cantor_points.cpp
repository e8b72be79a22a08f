#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <set>

#include "spectral_cantor/cantor_points.hpp"

using namespace spectral_cantor;

namespace {

// Independent evaluation of the defining series, term by term.
double delta_series(const std::string& a, const std::string& b, double g) {
  double s = 0.0;
  for (std::size_t n = 1; n <= std::max(a.size(), b.size()); ++n) {
    const int x = n <= a.size() ? a[n - 1] - '0' : 0;
    const int y = n <= b.size() ? b[n - 1] - '0' : 0;
    s += std::abs(x - y) * std::pow(g, static_cast<double>(n) - 1.0) * (1.0 - g);
  }
  return s;
}

std::string random_bits(std::mt19937_64& rng, std::size_t len) {
  std::string s(len, '0');
  for (auto& c : s) c = (rng() & 1U) ? '1' : '0';
  return s;
}

}  // namespace

TEST_CASE("gamma is validated") {
  CHECK_THROWS_AS(GammaParam(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GammaParam(1.0), std::invalid_argument);
  CHECK_THROWS_AS(GammaParam(-0.2), std::invalid_argument);
  CHECK_THROWS_AS(GammaParam(std::nan("")), std::invalid_argument);
  CHECK(GammaParam(0.5).dimension() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(GammaParam(1.0 / 3.0).dimension() == doctest::Approx(0.63093).epsilon(1e-5));
  CHECK(GammaParam(std::pow(2.0, -0.25)).dimension() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("parsing, printing and equality on the coordinate function") {
  const auto x = CantorPoint::parse("0110");
  CHECK(x.coordinate(1) == 0);
  CHECK(x.coordinate(2) == 1);
  CHECK(x.coordinate(3) == 1);
  CHECK(x.coordinate(4) == 0);
  CHECK(x.coordinate(500) == 0);
  CHECK(x.to_string() == "0110");
  CHECK(x.support_level() == 4);
  CHECK(x.highest_set() == 3);
  CHECK(CantorPoint::parse("011") == CantorPoint::parse("0110000000"));
  CHECK_FALSE(CantorPoint::parse("011") == CantorPoint::parse("0111"));
  CHECK_THROWS_AS(CantorPoint::parse("01a"), std::invalid_argument);
  CHECK(CantorPoint::from_index(0b110, 3).to_string() == "011");
  CHECK(CantorPoint::parse("011").atom_index(3) == 0b110);
}

TEST_CASE("points past 64 coordinates") {
  CantorPoint x;
  x.set_coordinate(130, 1);
  CHECK(x.highest_set() == 130);
  CHECK(x.coordinate(130) == 1);
  CHECK(x.truncated(129).highest_set() == 0);
  CHECK(first_disagreement(x, CantorPoint{}) == std::optional<std::size_t>(130));
}

TEST_CASE("first disagreement") {
  CHECK_FALSE(first_disagreement(CantorPoint::parse("0000"), CantorPoint::parse("0000")).has_value());
  CHECK(first_disagreement(CantorPoint::parse("0000"), CantorPoint::parse("0100")) == std::optional<std::size_t>(2));
  CHECK(first_disagreement(CantorPoint::parse("110"), CantorPoint::parse("111000")) == std::optional<std::size_t>(3));
}

TEST_CASE("delta_gamma values") {
  const GammaParam half(0.5);
  CHECK(delta_gamma(CantorPoint::parse("0110"), CantorPoint::parse("0110"), half) == 0.0);
  CHECK(delta_gamma(CantorPoint::parse("000"), CantorPoint::parse("100"), half) == doctest::Approx(0.5));
  std::mt19937_64 rng(11);
  for (double g : {0.2, 1.0 / 3.0, 0.5, 0.8}) {
    for (int k = 0; k < 200; ++k) {
      const auto a = random_bits(rng, 1 + rng() % 70), b = random_bits(rng, 1 + rng() % 70);
      CHECK(delta_gamma(CantorPoint::parse(a), CantorPoint::parse(b), GammaParam(g)) ==
            doctest::Approx(delta_series(a, b, g)).epsilon(1e-13));
    }
  }
}

TEST_CASE("delta_gamma is a metric with the first-disagreement sandwich") {
  std::mt19937_64 rng(12);
  for (double g : {0.3, 0.5, 0.7, 0.9}) {
    const GammaParam gp(g);
    for (int k = 0; k < 300; ++k) {
      const auto x = CantorPoint::parse(random_bits(rng, 24));
      const auto y = CantorPoint::parse(random_bits(rng, 24));
      const auto z = CantorPoint::parse(random_bits(rng, 24));
      const double xy = delta_gamma(x, y, gp), yz = delta_gamma(y, z, gp), xz = delta_gamma(x, z, gp);
      CHECK(xy >= 0.0);
      CHECK(xy == delta_gamma(y, x, gp));
      CHECK(xz <= xy + yz + 1e-15);
      if (const auto m = first_disagreement(x, y)) {
        const double gm = std::pow(g, static_cast<double>(*m) - 1.0);
        CHECK(xy >= gm * (1.0 - g) * (1.0 - 1e-14));
        CHECK(xy <= gm * (1.0 + 1e-14));
      } else {
        CHECK(xy == 0.0);
      }
    }
  }
}

TEST_CASE("standard_interval_of") {
  const auto a = standard_interval_of(CantorPoint{}, 0.2, GammaParam(0.5));
  CHECK(a.level == 2);
  CHECK(a.prefix.to_string(2) == "00");
  CHECK(a.diameter(GammaParam(0.5)) == doctest::Approx(0.25));
  CHECK(standard_interval_of(CantorPoint::parse("1011"), 0.6, GammaParam(1.0 / 3.0)).level == 1);
  CHECK_THROWS_AS(standard_interval_of(CantorPoint{}, 0.5, GammaParam(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(standard_interval_of(CantorPoint{}, 0.9, GammaParam(0.5)), std::invalid_argument);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(1e-9, 1.0);
  for (double g : {0.2, 0.5, 0.75}) {
    const GammaParam gp(g);
    for (int k = 0; k < 200; ++k) {
      const double bound = unif(rng) * (1.0 - g);
      const auto u = CantorPoint::parse(random_bits(rng, 40));
      const auto v = standard_interval_of(u, bound, gp);
      CHECK(v.contains(u));
      CHECK(v.diameter(gp) <= bound / (1.0 - g));
      // Least such level: one level coarser is too big.
      if (v.level > 0) CHECK(std::pow(g, static_cast<double>(v.level) - 1.0) > bound / (1.0 - g));
    }
  }
}

TEST_CASE("standard intervals of a level partition the prefixes") {
  for (std::size_t n : {1U, 3U, 6U}) {
    const auto all = standard_intervals(n);
    CHECK(all.size() == (std::size_t{1} << n));
    std::set<std::string> prefixes;
    for (const auto& v : all) prefixes.insert(v.prefix.to_string(n));
    CHECK(prefixes.size() == all.size());
    std::mt19937_64 rng(n);
    for (int k = 0; k < 50; ++k) {
      const auto x = CantorPoint::parse(random_bits(rng, 10));
      int hits = 0;
      for (const auto& v : all) hits += v.contains(x) ? 1 : 0;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("diameter of a standard interval is attained from every point") {
  const GammaParam gp(0.6);
  const std::size_t n = 3, L = 12;
  for (const auto& v : standard_intervals(n)) {
    std::vector<CantorPoint> members;
    for (std::uint64_t tail = 0; tail < (std::uint64_t{1} << (L - n)); ++tail) {
      members.push_back(CantorPoint::from_index(v.prefix.atom_index(n) | (tail << n), L));
    }
    for (std::size_t i = 0; i < members.size(); i += 37) {
      double far = 0.0;
      for (const auto& y : members) far = std::max(far, delta_gamma(members[i], y, gp));
      // Flipping every free coordinate up to L gives gamma^n - gamma^L.
      CHECK(far == doctest::Approx(std::pow(0.6, 3.0) - std::pow(0.6, 12.0)).epsilon(1e-13));
    }
  }
}

TEST_CASE("cover_sum") {
  const GammaParam third(1.0 / 3.0);
  CHECK(cover_sum(5, third.dimension(), third) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cover_sum(3, 2.0, GammaParam(0.5)) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(cover_sum(1, 0.0, GammaParam(0.4)) == doctest::Approx(2.0).epsilon(1e-15));
  for (double g : {0.1, 0.5, 0.77, 0.95}) {
    const GammaParam gp(g);
    for (std::size_t n = 1; n <= 40; ++n) CHECK(std::abs(cover_sum(n, gp.dimension(), gp) - 1.0) <= 1e-12);
  }
}
