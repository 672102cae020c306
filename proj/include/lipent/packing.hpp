#pragma once

// Explicit packing families for Lipschitz classes: hat functions on a finite
// metric space (sup norm), greedy Gilbert-Varshamov sign codes, and the
// plateau-bump family on [0,1]^d (L^1 norm).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipent/grid.hpp"
#include "lipent/metricspace.hpp"
#include "lipent/sampled.hpp"

namespace lipent {

// ---------------------------------------------------------------------------
// Hat family

inline constexpr std::size_t kMaxHatCenters = 16;  // at most 2^16 members

/// Members f_sigma(u) = sum_j sigma_j * max(3 eps - d(u, u_j), 0) for
/// sigma in {0,1}^N, where the centers u_j are pairwise >= 6 eps apart.
/// A member is addressed by the bitmask of sigma (bit j = sigma_j).
class HatFamily {
 public:
  HatFamily(const FiniteMetricSpace& space, IndexSet centers, double eps);

  std::size_t center_count() const noexcept { return centers_.size(); }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << centers_.size(); }
  const IndexSet& centers() const noexcept { return centers_; }
  double eps() const noexcept { return eps_; }
  std::size_t sample_count() const noexcept { return samples_; }

  /// Values of member `sigma` at every point of the space.
  std::vector<double> evaluate(std::uint64_t sigma) const;
  SampledFunctional member(std::uint64_t sigma, const std::string& sample_set = "K") const;
  double sup_distance(std::uint64_t a, std::uint64_t b) const;

  nlohmann::json manifest() const;

 private:
  IndexSet centers_;
  double eps_;
  std::size_t samples_;
  std::vector<std::vector<double>> hats_;  // hats_[j][u] = psi_j(u)
};

/// Chooses a 6 eps-separated set of centers (exact packing when the space has
/// at most kExactLimit points, greedy otherwise) and builds the family.
/// Throws NoPacking when fewer than two centers exist and FamilyTooLarge when
/// 2^N exceeds 2^16.
HatFamily build_hat_family(const FiniteMetricSpace& space, double eps);

struct HatVerification {
  double min_pair_distance = 0.0;  // min sup distance over checked pairs
  double max_sup = 0.0;
  double max_lipschitz = 0.0;      // over all members, on the sample set
  std::uint64_t pairs_checked = 0;
  bool exhaustive = false;
  bool ok = false;
};

/// Exhaustive pairwise check when the family has at most 2^10 members,
/// 1000 seeded random pairs otherwise.
HatVerification verify_hat_family(const HatFamily& family, const FiniteMetricSpace& space, std::uint64_t seed = 0);

/// 2^{H(K;6 eps)}: the predicted lower bound on H(Lip_1(K); eps).
double entropy_lower_bound_uniform(double entropy_k_6eps);

// ---------------------------------------------------------------------------
// Sign codes

/// Words in {-1,+1}^n stored as bitmasks (bit i set <=> coordinate i is -1).
struct SignCode {
  int length = 0;
  int required_distance = 0;     // ceil(n/4)
  std::uint64_t target_size = 0; // ceil(e^{n/8})
  std::vector<std::uint64_t> words;

  int sign(std::size_t word, int coordinate) const { return ((words[word] >> coordinate) & 1U) ? -1 : 1; }
  /// Exhaustive minimum pairwise Hamming distance (length + 1 for a single word).
  int min_distance() const;
  nlohmann::json manifest() const;
};

inline constexpr int kMaxCodeLength = 40;

/// Greedy lexicographic code: scan 0, 1, 2, ... (as bitmasks) and keep a word
/// iff its Hamming distance to every kept word is >= ceil(n/4); stop at
/// ceil(e^{n/8}) words. Valid for 1 <= n <= kMaxCodeLength.
SignCode gilbert_varshamov(int length);

// ---------------------------------------------------------------------------
// Bump family

/// f_sigma = (lambda / 2N) * sum_j sigma_j phi_{lambda,j} over the N^d
/// subcubes of [0,1]^d, where phi_lambda(x) = min_a g_lambda(x_a): equal to 1
/// on [lambda/2, 1 - lambda/2]^d, vanishing on the cube boundary, and
/// 2/lambda-Lipschitz in the l^inf norm. Members are indexed by code word.
class BumpFamily {
 public:
  BumpFamily(int dim, int subdivisions, int grid_resolution, SignCode code, double lambda);

  int dim() const noexcept { return dim_; }
  int subdivisions() const noexcept { return subdivisions_; }
  int grid_resolution() const noexcept { return grid_resolution_; }
  double lambda() const noexcept { return lambda_; }
  const SignCode& code() const noexcept { return code_; }
  std::size_t size() const noexcept { return code_.words.size(); }
  double amplitude() const noexcept { return lambda_ / (2.0 * subdivisions_); }

  /// phi_lambda on the unit cube.
  double bump(std::span<const double> x) const;
  /// Exact value of member `sigma` at x in [0,1]^d.
  double evaluate(std::size_t member, std::span<const double> x) const;
  /// Member sampled at the grid nodes.
  UnitGridFunction grid_member(std::size_t member) const;

  /// Midpoint-rule L^1 distance on the grid cells.
  double l1_distance(std::size_t a, std::size_t b) const;
  /// Midpoint-rule L^1 norm of phi_lambda on the unit cube.
  double bump_l1_quadrature() const;
  /// Max |f(x)-f(y)| / |x-y|_inf over node pairs: all pairs when the grid
  /// resolution is <= 64, axis neighbours otherwise.
  double discrete_lipschitz(std::size_t member) const;

  /// 1 / (8 e d N).
  double separation_bound() const;

  nlohmann::json manifest() const;

 private:
  int cube_of(double coordinate) const;

  int dim_;
  int subdivisions_;
  int grid_resolution_;
  SignCode code_;
  double lambda_;
};

/// Closed form of the L^1 norm of phi_lambda on the unit cube:
/// (1 - (1 - lambda)^{d+1}) / (lambda (d + 1)).
double bump_l1_closed_form(int dim, double lambda);

/// Throws GridMisaligned unless grid_resolution is a multiple of
/// 2N(d+1) (lambda = 1/(1+d) places the plateau breakpoints on nodes).
BumpFamily build_bump_family(int dim, int subdivisions, int grid_resolution, SignCode code);
BumpFamily build_bump_family(int dim, int subdivisions, int grid_resolution, SignCode code, double lambda);

struct BumpVerification {
  double min_pair_l1 = 0.0;
  double separation_bound = 0.0;
  double measured_constant = 0.0;  // min_pair_l1 * 8 e d N
  double max_sup = 0.0;
  double max_lipschitz = 0.0;
  double bump_l1 = 0.0;
  double bump_l1_lower = 0.0;      // (1 - lambda)^d
  bool ok = false;
};

BumpVerification verify_bump_family(const BumpFamily& family, double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Dimension selection

struct DimensionChoice {
  int d = 0;
  double beta = 0.0;            // -log(c2 / c1)
  bool lower_inequality = false;  // eps d^{1+a} <= c1 e^{-beta}
  bool upper_inequality = false;  // c1 e^{-beta} < eps (2d)^{1+a}
  bool dd1 = false;             // eps <= c2 d^{-(1+a)}
  bool dd2 = false;             // c1 / (d^{1+a} eps) >= e^beta
  bool dd3 = false;             // beta d >= c' eps^{-1/(1+a)}, c' = beta (c1 / (2^{1+a} e^beta))^{1/(1+a)}
  bool dd3_loose_constant = false;  // same with the larger constant beta (c1 / (2 e^beta))^{1/(1+a)}
};

/// Largest d with eps d^{1+alpha} <= c2 (< eps (2d)^{1+alpha} then follows).
/// Requires 0 < eps <= c2 <= c1 and alpha > 0; throws EpsilonTooLarge for eps > c2.
DimensionChoice select_embedding_dimension(double eps, double c1, double c2, double alpha);

}  // namespace lipent
