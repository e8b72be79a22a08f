#pragma once

// Embeddings of (prod Z_2, delta_gamma) into l^1 and R^e, box-counting
// dimension, Hausdorff-measure bounds, Gromov-Hausdorff bounds and the
// universal space of scaled Cantor sets.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral_cantor/cantor_points.hpp"

namespace spectral_cantor {

enum class NormTag { l1, l2, linf, e_max };

std::string to_string(NormTag tag);

/// Distance of two coordinate vectors in the given norm. For e_max the
/// first coordinate is the R factor and the rest the l^1 factor.
double cloud_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, NormTag tag);

struct EmbeddedCloud {
  std::vector<Eigen::VectorXd> points;
  NormTag norm = NormTag::l1;
  double gamma = 0.0;
  std::size_t level = 0;
  /// Source bit sequences when the cloud comes from Cantor points.
  std::vector<CantorPoint> sources;
};

/// First L coordinates of f_gamma(x)(n) = gamma^(n-1) (1 - gamma) x(n).
/// Throws std::invalid_argument if x has a nonzero coordinate past L.
Eigen::VectorXd embed_f_gamma(const CantorPoint& x, const GammaParam& g, std::size_t L);

/// floor(log 2 / -log gamma) + 1, with log 2 / -log gamma taken as an
/// integer when within 1e-12 of one.
std::size_t e_gamma(const GammaParam& g);

/// F_gamma(x) in R^{e_gamma}.
Eigen::VectorXd embed_F_gamma(const CantorPoint& x, const GammaParam& g, std::size_t L);

struct LipschitzPair {
  double lower = 0.0;  // (1 - 2 gamma^e) gamma
  double upper = 0.0;  // gamma^(1-e) / (1 - gamma)
};
LipschitzPair F_gamma_constants(const GammaParam& g);

/// All 2^L points of the level-L truncation, through f_gamma (l1) or F_gamma (l2).
/// Throws std::length_error above L = 22.
EmbeddedCloud cantor_cloud_f(const GammaParam& g, std::size_t L);
EmbeddedCloud cantor_cloud_F(const GammaParam& g, std::size_t L);

enum class BoxMethod { automatic, intervals, grid };

struct DimensionEstimate {
  double slope = 0.0;
  double residual = 0.0;  // root-mean-square residual of the fit
  std::vector<double> scales;
  std::vector<double> counts;
  BoxMethod method = BoxMethod::automatic;
};

/// Least-squares slope of log N(eps) against log(1/eps). Interval counting
/// (distinct prefixes of the sources at the level of the least standard
/// interval of diameter <= eps) is used when the cloud has Cantor sources,
/// grid counting (half-open boxes of side eps anchored at the origin)
/// otherwise. Needs at least 4 scales whose extremes differ by a factor of
/// 10^min_decades.
DimensionEstimate box_dimension(const EmbeddedCloud& cloud, const std::vector<double>& scales,
                                BoxMethod method = BoxMethod::automatic, double min_decades = 2.0);

struct HausdorffBounds {
  double lower = 0.0;      // (1 - gamma)^t
  double upper = 1.0;
  double cover_sum = 0.0;  // exact level-n cover sum, the upper-bound certificate
  double dimension = 0.0;  // t
};
HausdorffBounds hausdorff_bounds(const GammaParam& g, std::size_t n);

/// 2 (gamma - mu) / (1 - gamma) with the arguments ordered so that gamma >= mu.
double gh_upper_bound(const GammaParam& gamma, const GammaParam& mu);

/// max over all 2^L bit patterns of ||(gamma, f_gamma(x)) - (mu, f_mu(x))||
/// in the E-max norm: the Hausdorff distance certified by matching equal
/// bit sequences. Throws std::length_error above L = 24.
double gh_correspondence_distance(const GammaParam& gamma, const GammaParam& mu, std::size_t L);

enum class Membership { scaled_cantor, e1, outside };

struct MembershipVerdict {
  Membership kind = Membership::outside;
  std::optional<double> gamma;      // recovered gamma for scaled_cantor
  std::optional<CantorPoint> bits;  // recovered x
  double residual = 0.0;            // l1 distance to the matched point
  std::string reason;
};

/// Classifies v against E = {e_1} u U_gamma (1 - gamma) C_gamma, after the
/// envelope 0 <= v(n) <= 4/(n+1)^2.
MembershipVerdict universal_space_membership(const Eigen::VectorXd& v, double tol = 1e-12);

}  // namespace spectral_cantor
