#include "spectral_cantor/cantor_points.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace spectral_cantor {

namespace {

constexpr std::size_t kBlockBits = 64;

std::size_t blocks_for(std::size_t level) { return (level + kBlockBits - 1) / kBlockBits; }

}  // namespace

GammaParam::GammaParam(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie strictly between 0 and 1, got " +
                                std::to_string(gamma));
  }
}

double GammaParam::dimension() const noexcept { return std::log(2.0) / -std::log(gamma_); }

CantorPoint CantorPoint::parse(std::string_view bits) {
  CantorPoint p;
  p.support_level_ = bits.size();
  p.blocks_.assign(blocks_for(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const char c = bits[i];
    if (c == '1') {
      p.blocks_[i / kBlockBits] |= std::uint64_t{1} << (i % kBlockBits);
    } else if (c != '0') {
      throw std::invalid_argument("invalid bit string '" + std::string(bits) +
                                  "': only '0' and '1' are allowed");
    }
  }
  return p;
}

CantorPoint CantorPoint::from_index(std::uint64_t index, std::size_t level) {
  if (level < 64 && (index >> level) != 0) {
    throw std::invalid_argument("atom index does not fit in the requested level");
  }
  CantorPoint p;
  p.support_level_ = level;
  p.blocks_.assign(blocks_for(level), 0);
  if (!p.blocks_.empty()) p.blocks_[0] = index;
  return p;
}

int CantorPoint::coordinate(std::size_t n) const noexcept {
  if (n == 0) return 0;
  const std::size_t i = n - 1;
  const std::size_t b = i / kBlockBits;
  if (b >= blocks_.size()) return 0;
  return static_cast<int>((blocks_[b] >> (i % kBlockBits)) & 1U);
}

void CantorPoint::set_coordinate(std::size_t n, int value) {
  if (n == 0) throw std::invalid_argument("coordinates are 1-based");
  if (value != 0 && value != 1) throw std::invalid_argument("coordinate value must be 0 or 1");
  const std::size_t i = n - 1;
  if (blocks_for(n) > blocks_.size()) blocks_.resize(blocks_for(n), 0);
  const std::uint64_t mask = std::uint64_t{1} << (i % kBlockBits);
  if (value) {
    blocks_[i / kBlockBits] |= mask;
  } else {
    blocks_[i / kBlockBits] &= ~mask;
  }
  support_level_ = std::max(support_level_, n);
}

std::size_t CantorPoint::highest_set() const noexcept {
  for (std::size_t b = blocks_.size(); b-- > 0;) {
    if (blocks_[b] != 0) {
      return b * kBlockBits + (kBlockBits - static_cast<std::size_t>(std::countl_zero(blocks_[b])));
    }
  }
  return 0;
}

std::uint64_t CantorPoint::atom_index(std::size_t level) const {
  if (level > 63) throw std::invalid_argument("atom index supports levels up to 63");
  if (highest_set() > level) {
    throw std::invalid_argument("point " + to_string() + " is not supported within level " +
                                std::to_string(level));
  }
  return blocks_.empty() ? 0 : blocks_[0];
}

CantorPoint CantorPoint::truncated(std::size_t n) const {
  CantorPoint p;
  p.support_level_ = n;
  p.blocks_.assign(blocks_for(n), 0);
  for (std::size_t b = 0; b < p.blocks_.size() && b < blocks_.size(); ++b) p.blocks_[b] = blocks_[b];
  if (n % kBlockBits != 0 && !p.blocks_.empty()) {
    p.blocks_.back() &= (std::uint64_t{1} << (n % kBlockBits)) - 1;
  }
  return p;
}

std::string CantorPoint::to_string() const { return to_string(std::max<std::size_t>(support_level_, 1)); }

std::string CantorPoint::to_string(std::size_t width) const {
  std::string s(width, '0');
  for (std::size_t n = 1; n <= width; ++n) {
    if (coordinate(n)) s[n - 1] = '1';
  }
  return s;
}

bool operator==(const CantorPoint& a, const CantorPoint& b) noexcept {
  const std::size_t n = std::max(a.blocks_.size(), b.blocks_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = i < a.blocks_.size() ? a.blocks_[i] : 0;
    const std::uint64_t y = i < b.blocks_.size() ? b.blocks_[i] : 0;
    if (x != y) return false;
  }
  return true;
}

std::optional<std::size_t> first_disagreement(const CantorPoint& x, const CantorPoint& y) {
  const auto& xb = x.blocks();
  const auto& yb = y.blocks();
  const std::size_t n = std::max(xb.size(), yb.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t d = (i < xb.size() ? xb[i] : 0) ^ (i < yb.size() ? yb[i] : 0);
    if (d != 0) return i * kBlockBits + static_cast<std::size_t>(std::countr_zero(d)) + 1;
  }
  return std::nullopt;
}

double delta_gamma(const CantorPoint& x, const CantorPoint& y, const GammaParam& g) {
  const double gamma = g.value();
  const auto& xb = x.blocks();
  const auto& yb = y.blocks();
  const std::size_t nb = std::max(xb.size(), yb.size());
  // Terms decrease geometrically, so summing from the tail keeps the small
  // contributions from being absorbed.
  double sum = 0.0;
  for (std::size_t b = nb; b-- > 0;) {
    std::uint64_t d = (b < xb.size() ? xb[b] : 0) ^ (b < yb.size() ? yb[b] : 0);
    while (d != 0) {
      const int top = 63 - std::countl_zero(d);
      const std::size_t n = b * kBlockBits + static_cast<std::size_t>(top) + 1;
      sum += std::pow(gamma, static_cast<double>(n - 1));
      d &= ~(std::uint64_t{1} << top);
    }
  }
  return sum * (1.0 - gamma);
}

StandardInterval::StandardInterval(CantorPoint p, std::size_t n) : prefix(std::move(p)), level(n) {
  if (prefix.highest_set() > level) {
    throw std::invalid_argument("standard interval prefix has a nonzero coordinate past its level");
  }
}

bool StandardInterval::contains(const CantorPoint& x) const { return x.truncated(level) == prefix; }

double StandardInterval::diameter(const GammaParam& g) const {
  return std::pow(g.value(), static_cast<double>(level));
}

StandardInterval standard_interval_of(const CantorPoint& u, double diameter_bound,
                                      const GammaParam& g) {
  const double gamma = g.value();
  if (!(diameter_bound > 0.0) || !(diameter_bound < 1.0 - gamma)) {
    throw std::invalid_argument("diameter bound must lie in (0, 1 - gamma)");
  }
  const double ratio = diameter_bound / (1.0 - gamma);
  double estimate = std::ceil(std::log(ratio) / std::log(gamma));
  std::size_t n = estimate < 1.0 ? 1 : static_cast<std::size_t>(estimate);
  // The ceiling is the least n with gamma^n <= ratio; repair rounding either way.
  while (std::pow(gamma, static_cast<double>(n)) > ratio) ++n;
  while (n > 1 && std::pow(gamma, static_cast<double>(n - 1)) <= ratio) --n;
  return StandardInterval(u.truncated(n), n);
}

std::vector<StandardInterval> standard_intervals(std::size_t level) {
  if (level > 30) throw std::length_error("refusing to enumerate more than 2^30 standard intervals");
  std::vector<StandardInterval> out;
  out.reserve(std::size_t{1} << level);
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << level); ++s) {
    out.emplace_back(CantorPoint::from_index(s, level), level);
  }
  return out;
}

double cover_sum(std::size_t level, double t, const GammaParam& g) {
  const double n = static_cast<double>(level);
  return std::exp(n * (std::log(2.0) + t * std::log(g.value())));
}

}  // namespace spectral_cantor
