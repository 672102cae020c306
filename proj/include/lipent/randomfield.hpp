#pragma once

// Karhunen-Loeve product measures u = sum_j sqrt(lambda_j) Z_j e_j, the CDF
// map h_d into [0,1]^d, the embedding f -> f o h_d and Monte-Carlo L^p(mu)
// norms.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "lipent/grid.hpp"

namespace lipent {

enum class CoordinateLaw { Gaussian, Uniform };

const char* to_string(CoordinateLaw law) noexcept;

/// Standard normal CDF, 0.5 * erfc(-z / sqrt 2).
double gaussian_cdf(double z);

class KLMeasure {
 public:
  KLMeasure(std::vector<double> eigenvalues, CoordinateLaw law);

  /// lambda_j = j^{-2 alpha}, j = 1..J.
  static KLMeasure power_law(double alpha, std::size_t truncation, CoordinateLaw law);
  /// {"lambda": "j^-2a" | [..], "alpha": a, "J": J, "law": "gaussian" | "uniform"}
  static KLMeasure from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::size_t truncation() const noexcept { return eigenvalues_.size(); }
  double eigenvalue(std::size_t j) const { return eigenvalues_.at(j); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  CoordinateLaw law() const noexcept { return law_; }

  /// sup of the coordinate density: 1/sqrt(2 pi) or 1/(2 sqrt 3).
  double density_sup() const noexcept;
  /// L = max(density_sup, sqrt(lambda_1)).
  double density_bound() const noexcept;
  /// CDF of the unit-variance coordinate law.
  double cdf(double z) const noexcept;
  /// Draw of one unit-variance coordinate Z_j.
  template <class Rng>
  double draw(Rng& rng) const;

 private:
  std::vector<double> eigenvalues_;
  CoordinateLaw law_;
  nlohmann::json lambda_spec_;
  double alpha_ = 0.0;
};

struct CoordinateSample {
  std::vector<double> coefficients;  // u_j = sqrt(lambda_j) Z_j
  double norm_squared() const noexcept;
};

/// Samples are drawn in chunks of kSampleChunk; chunk c uses its own engine
/// seeded with derive_seed(derive_seed(seed, kSampling), c). Sample i is thus
/// a function of (seed, i) alone.
inline constexpr std::size_t kSampleChunk = 4096;

std::vector<CoordinateSample> sample(const KLMeasure& measure, std::uint64_t seed, std::size_t count);

/// Calls `visit` on samples 0..count-1 of the stream without storing them.
void for_each_sample(const KLMeasure& measure, std::uint64_t seed, std::size_t count,
                     const std::function<void(const CoordinateSample&)>& visit);

/// (F_1(u_1/sqrt lambda_1), ..., F_d(u_d/sqrt lambda_d)).
std::vector<double> cdf_map(const KLMeasure& measure, const CoordinateSample& u, int d);

/// u -> f(h_d(u)) for a grid function f on [0,1]^d.
class EmbeddedFunctional {
 public:
  EmbeddedFunctional(UnitGridFunction base, double base_lipschitz, KLMeasure measure);

  double operator()(const CoordinateSample& u) const;
  int dim() const noexcept { return base_.dim(); }
  const UnitGridFunction& base() const noexcept { return base_; }
  const KLMeasure& measure() const noexcept { return measure_; }
  double base_lipschitz() const noexcept { return base_lipschitz_; }
  /// base_lipschitz * L / sqrt(lambda_d).
  double lipschitz_bound() const noexcept;

 private:
  UnitGridFunction base_;
  double base_lipschitz_;
  KLMeasure measure_;
};

/// Throws DimensionExceedsTruncation when d > J.
EmbeddedFunctional embed(UnitGridFunction f, double lipschitz, const KLMeasure& measure);

struct MonteCarloNorm {
  double estimate = 0.0;       // (E|G|^p)^{1/p}
  double standard_error = 0.0; // delta-method standard error of the estimate
  double moment = 0.0;         // E|G|^p
  double moment_standard_error = 0.0;
  std::size_t samples = 0;
};

using Functional = std::function<double(const CoordinateSample&)>;

MonteCarloNorm lp_norm_mc(const Functional& functional, const KLMeasure& measure, double p, std::size_t samples,
                          std::uint64_t seed);

struct IsometryReport {
  double lhs = 0.0;         // Monte-Carlo E|f o h_d|^p
  double lhs_standard_error = 0.0;
  double rhs = 0.0;         // grid quadrature of |f|^p on [0,1]^d
  double zscore = 0.0;
  std::size_t samples = 0;
  bool retried = false;
  nlohmann::json to_json() const;
};

IsometryReport isometry_check(const UnitGridFunction& f, const KLMeasure& measure, double p, std::size_t samples,
                              std::uint64_t seed);

/// Runs isometry_check and, when |zscore| > z_limit, repeats it once with
/// twice the samples on an independent stream; the second report is final.
IsometryReport isometry_check_with_retry(const UnitGridFunction& f, const KLMeasure& measure, double p,
                                         std::size_t samples, std::uint64_t seed, double z_limit = 3.0);

/// Max of |G(u) - G(v)| / |u - v|_2 over `pairs` seeded pairs; half are
/// independent draws, half are small perturbations of a draw.
double lipschitz_transport_scan(const EmbeddedFunctional& functional, std::size_t pairs, std::uint64_t seed);

/// Kolmogorov-Smirnov statistic of the sample against Uniform(0,1).
double ks_statistic_uniform(std::vector<double> values);

// ---------------------------------------------------------------------------

template <class Rng>
double KLMeasure::draw(Rng& rng) const {
  if (law_ == CoordinateLaw::Gaussian) return rng.normal();
  return rng.uniform(-1.7320508075688772, 1.7320508075688772);
}

}  // namespace lipent
