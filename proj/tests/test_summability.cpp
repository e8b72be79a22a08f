#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "spectral_cantor/summability.hpp"

using namespace spectral_cantor;

TEST_CASE("geometric traces") {
  const auto mult = cantor_multiplicity();
  const auto half = DiracSpec::geometric(GammaParam(0.5));
  const auto r = trace_power(half, mult, 2.0, 200);
  CHECK(r.partial_sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_FALSE(r.divergent);
  CHECK(r.term_ratio == doctest::Approx(0.5));

  const auto d = trace_power(half, mult, 1.0, 200);
  CHECK(d.divergent);
  CHECK(d.partial_sum == doctest::Approx(200.0));

  const auto one = trace_power(DiracSpec::geometric(GammaParam(0.3)), mult, 1.7, 1);
  CHECK(one.partial_sum == 1.0);  // alpha_1 = 1, mult 1
  const auto custom = trace_power(DiracSpec::custom({0.0, 3.0}), multiplicity_from({1.0, 5.0}), 2.0, 1);
  CHECK(custom.partial_sum == doctest::Approx(5.0 / 9.0));

  CHECK_THROWS_AS(trace_power(half, mult, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(trace_power(half, mult, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(trace_power(DiracSpec::custom({0.0, 0.0}), mult, 1.0, 1), std::invalid_argument);
}

TEST_CASE("closed form against direct summation") {
  const auto mult = cantor_multiplicity();
  for (double g : {0.3, 0.5, 0.7}) {
    for (double s : {1.0, 2.0, 3.0}) {
      const GammaParam gp(g);
      for (std::size_t k = 1; k <= 200; k += 7) {
        // Direct evaluation of sum_{n=1}^k gamma^((n-1)s) 2^(n-1).
        long double direct = 0.0L;
        for (std::size_t n = 1; n <= k; ++n) direct += std::pow(2.0L * std::pow(static_cast<long double>(g), s), n - 1.0L);
        const double closed = trace_power_closed_form(gp, s, k);
        CHECK(std::abs(closed - static_cast<double>(direct)) <= 1e-12 * static_cast<double>(direct));
        CHECK(std::abs(trace_power(DiracSpec::geometric(gp), mult, s, k).partial_sum - closed) <= 1e-12 * closed);
      }
    }
  }
  CHECK(trace_power_closed_form(GammaParam(0.5), 1.0, 37) == 37.0);
}

TEST_CASE("threshold") {
  CHECK(summability_threshold(GammaParam(1.0 / 3.0)) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-14));
  CHECK(summability_threshold(GammaParam(0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(summability_threshold(GammaParam(std::pow(2.0, -0.25))) == doctest::Approx(4.0).epsilon(1e-13));
  // Divergent exactly up to the threshold, convergent past it.
  const auto mult = cantor_multiplicity();
  for (double g : {0.3, 0.6, 0.8}) {
    const GammaParam gp(g);
    const double t = summability_threshold(gp);
    CHECK(trace_power(DiracSpec::geometric(gp), mult, t * 0.99, 400).divergent);
    CHECK(trace_power(DiracSpec::geometric(gp), mult, t, 400).divergent);
    CHECK_FALSE(trace_power(DiracSpec::geometric(gp), mult, t * 1.01, 400).divergent);
  }
}

TEST_CASE("partial sums decrease in s") {
  const auto mult = cantor_multiplicity();
  const auto spec = DiracSpec::geometric(GammaParam(0.6));
  double prev = INFINITY;
  for (double s = 0.5; s <= 4.0; s += 0.25) {
    const double v = trace_power(spec, mult, s, 60).partial_sum;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("resolvent traces") {
  std::vector<double> dims;
  for (int n = 1; n <= 10000; ++n) dims.push_back(n + 1.0);
  const auto r = trace_resolvent(af_recipe_spec(1.0, dims), af_recipe_multiplicity(dims), 1.0, 10000);
  CHECK(r.partial_sum <= 2.0);
  CHECK(r.partial_sum > 1.0);

  const auto zero = trace_resolvent(DiracSpec::custom(std::vector<double>(8, 0.0)), multiplicity_from(std::vector<double>(8, 1.0)),
                                    1.0, 7);
  CHECK(zero.partial_sum == 8.0);

  const auto mult = cantor_multiplicity();
  const auto half = DiracSpec::geometric(GammaParam(0.5));
  const double a = trace_resolvent(half, mult, 2.0, 60).partial_sum;
  const double b = trace_resolvent(half, mult, 2.0, 120).partial_sum;
  CHECK(std::abs(a - b) <= 1e-15);
  // Bounded by 1 + tr(D^-2).
  CHECK(a <= 1.0 + trace_power(half, mult, 2.0, 120).partial_sum);
  CHECK_THROWS_AS(trace_resolvent(half, mult, -1.0, 5), std::invalid_argument);
}

TEST_CASE("recipe spectra") {
  const std::vector<double> dims{2.0, 4.0, 7.0};
  const auto s = af_recipe_spec(0.5, dims);  // t = 6
  CHECK(s.eigenvalue(0) == 0.0);
  CHECK(s.eigenvalue(3) == doctest::Approx(std::pow(7.0, 6.0)));
  CHECK(af_recipe_spec(2.0, dims).eigenvalue(2) == doctest::Approx(16.0));  // t = 2
  const auto m = af_recipe_multiplicity(dims);
  CHECK(m(0) == 1.0);
  CHECK(m(1) == 1.0);
  CHECK(m(3) == 3.0);
  CHECK_THROWS_AS(af_recipe_spec(1.0, {2.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(af_recipe_spec(1.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(af_recipe_spec(0.0, dims), std::invalid_argument);
}

TEST_CASE("UHF families") {
  const auto car = UhfParams::from_factors(std::vector<double>(12, 2.0));
  CHECK(car.m[3] == 16.0);
  const auto power = uhf_power_spec(car, 2.0);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(power.eigenvalue(n) == doctest::Approx(std::pow(4.0, n)));
  const auto mult = uhf_multiplicity(car);
  CHECK(mult(0) == 1.0);
  CHECK(mult(1) == 3.0);
  CHECK(mult(3) == 48.0);
  CHECK_THROWS_AS(mult(13), std::out_of_range);

  // Family ii, p = 1, s = 3: terms stay under (2^(2 - ps))^n.
  const auto r = trace_resolvent(uhf_power_spec(car, 3.0), mult, 1.0, 12);
  double bound = 1.0;
  for (int n = 1; n <= 12; ++n) bound += std::pow(2.0, (2.0 - 3.0) * n);
  CHECK(r.partial_sum <= bound);

  std::vector<double> betas;
  for (int n = 1; n <= 12; ++n) betas.push_back(std::pow(2.0, -n));
  const auto sq = uhf_sqrt_spec(car, betas);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(sq.eigenvalue(n) == doctest::Approx(std::pow(2.0, n) * std::sqrt(car.m[n - 1])));
  CHECK_FALSE(trace_resolvent(sq, mult, 4.0, 12).divergent);

  CHECK_THROWS_AS(UhfParams::from_factors({2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(UhfParams::from_factors({2.5}), std::invalid_argument);
  CHECK_THROWS_AS(uhf_power_spec(car, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(uhf_sqrt_spec(car, {0.5}), std::invalid_argument);
}
