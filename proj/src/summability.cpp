#include "spectral_cantor/summability.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace spectral_cantor {

namespace {

// Neumaier summation in extended precision.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + c_; }

 private:
  long double sum_ = 0.0L;
  long double c_ = 0.0L;
};

constexpr double kRatioSlack = 1e-12;

TraceResult finish(const CompensatedSum& sum, long double last, long double previous, std::size_t k) {
  TraceResult r;
  r.partial_sum = static_cast<double>(sum.value());
  r.last_term = static_cast<double>(last);
  r.term_ratio = previous > 0.0L ? static_cast<double>(last / previous) : 0.0;
  r.divergent = previous > 0.0L && r.term_ratio >= 1.0 - kRatioSlack;
  r.horizon = k;
  return r;
}

}  // namespace

Multiplicity cantor_multiplicity() {
  return [](std::size_t n) { return n == 0 ? 1.0 : std::ldexp(1.0, static_cast<int>(n) - 1); };
}

Multiplicity multiplicity_from(std::vector<double> values) {
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  return [shared](std::size_t n) {
    if (n >= shared->size()) throw std::out_of_range("multiplicity list is too short");
    return (*shared)[n];
  };
}

TraceResult trace_power(const DiracSpec& spec, const Multiplicity& mult, double s, std::size_t horizon) {
  if (!(s > 0.0)) throw std::invalid_argument("exponent s must be positive");
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  CompensatedSum sum;
  long double last = 0.0L, previous = 0.0L;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const long double alpha = std::fabs(static_cast<long double>(spec.eigenvalue(n)));
    if (alpha == 0.0L) throw std::invalid_argument("zero eigenvalue outside the kernel");
    const long double term = std::pow(alpha, -static_cast<long double>(s)) * static_cast<long double>(mult(n));
    sum.add(term);
    previous = last;
    last = term;
  }
  return finish(sum, last, previous, horizon);
}

TraceResult trace_resolvent(const DiracSpec& spec, const Multiplicity& mult, double p, std::size_t horizon) {
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  CompensatedSum sum;
  long double last = 0.0L, previous = 0.0L;
  for (std::size_t n = 0; n <= horizon; ++n) {
    const long double alpha = static_cast<long double>(spec.eigenvalue(n));
    const long double term =
        std::exp(-0.5L * static_cast<long double>(p) * std::log1p(alpha * alpha)) * static_cast<long double>(mult(n));
    sum.add(term);
    previous = last;
    last = term;
  }
  return finish(sum, last, previous, horizon);
}

double trace_power_closed_form(const GammaParam& g, double s, std::size_t horizon) {
  const long double lq = std::log(2.0L) + static_cast<long double>(s) * std::log(static_cast<long double>(g.value()));
  if (lq == 0.0L) return static_cast<double>(horizon);
  return static_cast<double>(std::expm1(static_cast<long double>(horizon) * lq) / std::expm1(lq));
}

double summability_threshold(const GammaParam& g) { return g.dimension(); }

UhfParams UhfParams::from_factors(std::vector<double> d) {
  UhfParams p;
  double m = 1.0;
  for (double f : d) {
    if (!(f >= 2.0) || f != std::floor(f)) throw std::invalid_argument("every d_n must be an integer >= 2");
    m *= f;
    p.m.push_back(m);
  }
  p.d = std::move(d);
  return p;
}

Multiplicity uhf_multiplicity(const UhfParams& params) {
  auto m = std::make_shared<const std::vector<double>>(params.m);
  return [m](std::size_t n) {
    if (n == 0) return 1.0;
    if (n > m->size()) throw std::out_of_range("UHF parameters are too short");
    const double prev = n == 1 ? 1.0 : (*m)[n - 2];
    const double cur = (*m)[n - 1];
    return cur * cur - prev * prev;
  };
}

DiracSpec uhf_sqrt_spec(const UhfParams& params, const std::vector<double>& betas) {
  if (betas.size() < params.m.size()) throw std::invalid_argument("need one beta_n per level");
  return DiracSpec::uhf_sqrt(std::vector<double>(betas.begin(), betas.begin() + static_cast<std::ptrdiff_t>(params.m.size())),
                             params.m);
}

DiracSpec uhf_power_spec(const UhfParams& params, double s) {
  if (!(s > 1.0)) throw std::invalid_argument("the power family needs s > 1");
  return DiracSpec::uhf_power(s, params.m);
}

namespace {

void check_dims(const std::vector<double>& dims) {
  double prev = 1.0;
  for (double d : dims) {
    if (!(d > prev)) throw std::invalid_argument("dim A_n must be strictly increasing from dim A_0 = 1");
    prev = d;
  }
}

}  // namespace

DiracSpec af_recipe_spec(double p, const std::vector<double>& dims) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  check_dims(dims);
  const double t = std::max(2.0, 3.0 / p);
  std::vector<double> betas, cs(dims.size(), 1.0);
  betas.reserve(dims.size());
  for (double d : dims) betas.push_back(std::pow(d, -t));
  return DiracSpec::af_general(betas, cs);
}

Multiplicity af_recipe_multiplicity(const std::vector<double>& dims) {
  check_dims(dims);
  std::vector<double> mult(dims.size() + 1);
  mult[0] = 1.0;
  for (std::size_t i = 0; i < dims.size(); ++i) mult[i + 1] = dims[i] - (i == 0 ? 1.0 : dims[i - 1]);
  return multiplicity_from(std::move(mult));
}

}  // namespace spectral_cantor
