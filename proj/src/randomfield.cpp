#include "lipent/randomfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lipent/errors.hpp"
#include "lipent/io.hpp"
#include "lipent/rng.hpp"
#include "lipent/sampled.hpp"

namespace lipent {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

}  // namespace

const char* to_string(CoordinateLaw law) noexcept {
  return law == CoordinateLaw::Gaussian ? "gaussian" : "uniform";
}

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

KLMeasure::KLMeasure(std::vector<double> eigenvalues, CoordinateLaw law)
    : eigenvalues_(std::move(eigenvalues)), law_(law), lambda_spec_(eigenvalues_) {
  require(!eigenvalues_.empty(), ErrorCode::InvalidArgument, "KL truncation J must be >= 1");
  for (std::size_t j = 0; j < eigenvalues_.size(); ++j) {
    require(eigenvalues_[j] > 0.0 && std::isfinite(eigenvalues_[j]), ErrorCode::InvalidArgument,
            "KL eigenvalues must be positive");
    require(j == 0 || eigenvalues_[j] <= eigenvalues_[j - 1], ErrorCode::InvalidArgument,
            "KL eigenvalues must be nonincreasing");
  }
}

KLMeasure KLMeasure::power_law(double alpha, std::size_t truncation, CoordinateLaw law) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "power-law decay needs alpha > 0");
  std::vector<double> ev(truncation);
  for (std::size_t j = 0; j < truncation; ++j) ev[j] = std::pow(static_cast<double>(j + 1), -2.0 * alpha);
  KLMeasure m(std::move(ev), law);
  m.lambda_spec_ = "j^-2a";
  m.alpha_ = alpha;
  return m;
}

KLMeasure KLMeasure::from_json(const nlohmann::json& j) {
  check_keys(j, {"lambda", "alpha", "J", "law"}, "measure");
  const std::string law_name = j.value("law", std::string("gaussian"));
  require(law_name == "gaussian" || law_name == "uniform", ErrorCode::ConfigError,
          "measure law must be 'gaussian' or 'uniform'");
  const CoordinateLaw law = law_name == "gaussian" ? CoordinateLaw::Gaussian : CoordinateLaw::Uniform;
  const auto lambda = j.value("lambda", nlohmann::json("j^-2a"));
  if (lambda.is_array()) {
    require(!j.contains("alpha") && !j.contains("J"), ErrorCode::ConfigError,
            "explicit eigenvalue lists take no 'alpha' or 'J'");
    return KLMeasure(lambda.get<std::vector<double>>(), law);
  }
  require(lambda == "j^-2a", ErrorCode::ConfigError, "lambda must be \"j^-2a\" or an explicit list");
  require(j.contains("alpha"), ErrorCode::ConfigError, "power-law measure needs 'alpha'");
  const std::size_t truncation = j.value("J", std::size_t{64});
  return power_law(j.at("alpha").get<double>(), truncation, law);
}

nlohmann::json KLMeasure::to_json() const {
  nlohmann::json j{{"lambda", lambda_spec_}, {"law", to_string(law_)}};
  if (lambda_spec_.is_string()) {
    j["alpha"] = alpha_;
    j["J"] = eigenvalues_.size();
  }
  return j;
}

double KLMeasure::density_sup() const noexcept {
  return law_ == CoordinateLaw::Gaussian ? 1.0 / std::sqrt(2.0 * std::numbers::pi) : 1.0 / (2.0 * kSqrt3);
}

double KLMeasure::density_bound() const noexcept {
  return std::max(density_sup(), std::sqrt(eigenvalues_.front()));
}

double KLMeasure::cdf(double z) const noexcept {
  if (law_ == CoordinateLaw::Gaussian) return gaussian_cdf(z);
  return std::clamp((z + kSqrt3) / (2.0 * kSqrt3), 0.0, 1.0);
}

double CoordinateSample::norm_squared() const noexcept {
  CompensatedSum s;
  for (double u : coefficients) s.add(u * u);
  return s.value();
}

void for_each_sample(const KLMeasure& measure, std::uint64_t seed, std::size_t count,
                     const std::function<void(const CoordinateSample&)>& visit) {
  const std::uint64_t root = derive_seed(seed, streams::kSampling);
  const std::size_t J = measure.truncation();
  std::vector<double> scale(J);
  for (std::size_t j = 0; j < J; ++j) scale[j] = std::sqrt(measure.eigenvalue(j));
  CoordinateSample u{std::vector<double>(J)};
  for (std::size_t start = 0, chunk = 0; start < count; start += kSampleChunk, ++chunk) {
    Rng rng(derive_seed(root, chunk));
    const std::size_t stop = std::min(count, start + kSampleChunk);
    for (std::size_t i = start; i < stop; ++i) {
      for (std::size_t j = 0; j < J; ++j) u.coefficients[j] = scale[j] * measure.draw(rng);
      visit(u);
    }
  }
}

std::vector<CoordinateSample> sample(const KLMeasure& measure, std::uint64_t seed, std::size_t count) {
  std::vector<CoordinateSample> out;
  out.reserve(count);
  for_each_sample(measure, seed, count, [&](const CoordinateSample& u) { out.push_back(u); });
  return out;
}

std::vector<double> cdf_map(const KLMeasure& measure, const CoordinateSample& u, int d) {
  require(d >= 1, ErrorCode::InvalidArgument, "cdf map dimension must be >= 1");
  require(static_cast<std::size_t>(d) <= measure.truncation() && static_cast<std::size_t>(d) <= u.coefficients.size(),
          ErrorCode::DimensionExceedsTruncation, "cdf map dimension exceeds the KL truncation");
  std::vector<double> x(d);
  for (int j = 0; j < d; ++j) x[j] = measure.cdf(u.coefficients[j] / std::sqrt(measure.eigenvalue(j)));
  return x;
}

EmbeddedFunctional::EmbeddedFunctional(UnitGridFunction base, double base_lipschitz, KLMeasure measure)
    : base_(std::move(base)), base_lipschitz_(base_lipschitz), measure_(std::move(measure)) {
  require(static_cast<std::size_t>(base_.dim()) <= measure_.truncation(), ErrorCode::DimensionExceedsTruncation,
          "embedding dimension exceeds the KL truncation");
  require(base_lipschitz >= 0.0, ErrorCode::InvalidArgument, "declared Lipschitz constant must be nonnegative");
}

double EmbeddedFunctional::operator()(const CoordinateSample& u) const {
  const auto x = cdf_map(measure_, u, base_.dim());
  return base_(x);
}

double EmbeddedFunctional::lipschitz_bound() const noexcept {
  return base_lipschitz_ * measure_.density_bound() / std::sqrt(measure_.eigenvalue(base_.dim() - 1));
}

EmbeddedFunctional embed(UnitGridFunction f, double lipschitz, const KLMeasure& measure) {
  return EmbeddedFunctional(std::move(f), lipschitz, measure);
}

MonteCarloNorm lp_norm_mc(const Functional& functional, const KLMeasure& measure, double p, std::size_t samples,
                          std::uint64_t seed) {
  require(p >= 1.0 && std::isfinite(p), ErrorCode::InvalidArgument, "p must be finite and >= 1");
  require(samples >= 100, ErrorCode::InvalidArgument, "Monte-Carlo norm needs at least 100 samples");
  CompensatedSum sum, sum_sq;
  for_each_sample(measure, seed, samples, [&](const CoordinateSample& u) {
    const double v = std::pow(std::abs(functional(u)), p);
    sum.add(v);
    sum_sq.add(v * v);
  });
  const double n = static_cast<double>(samples);
  MonteCarloNorm r;
  r.samples = samples;
  r.moment = sum.value() / n;
  const double variance = std::max(0.0, (sum_sq.value() - n * r.moment * r.moment) / (n - 1.0));
  r.moment_standard_error = std::sqrt(variance / n);
  r.estimate = std::pow(r.moment, 1.0 / p);
  r.standard_error = r.moment > 0.0 ? r.moment_standard_error * std::pow(r.moment, 1.0 / p - 1.0) / p : 0.0;
  return r;
}

nlohmann::json IsometryReport::to_json() const {
  return {{"lhs", lhs}, {"lhs_stderr", lhs_standard_error}, {"rhs", rhs}, {"zscore", zscore}, {"samples", samples},
          {"retried", retried}};
}

IsometryReport isometry_check(const UnitGridFunction& f, const KLMeasure& measure, double p, std::size_t samples,
                              std::uint64_t seed) {
  const EmbeddedFunctional g = embed(f, 0.0, measure);
  const MonteCarloNorm mc = lp_norm_mc([&](const CoordinateSample& u) { return g(u); }, measure, p, samples, seed);
  IsometryReport r;
  r.lhs = mc.moment;
  r.lhs_standard_error = mc.moment_standard_error;
  r.rhs = f.integrate_abs_pow(p);
  r.samples = samples;
  const double diff = r.lhs - r.rhs;
  if (r.lhs_standard_error > 0.0)
    r.zscore = diff / r.lhs_standard_error;
  else
    r.zscore = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(r.rhs)) ? 0.0 : std::copysign(INFINITY, diff);
  return r;
}

IsometryReport isometry_check_with_retry(const UnitGridFunction& f, const KLMeasure& measure, double p,
                                         std::size_t samples, std::uint64_t seed, double z_limit) {
  IsometryReport r = isometry_check(f, measure, p, samples, seed);
  if (std::abs(r.zscore) <= z_limit) return r;
  r = isometry_check(f, measure, p, 2 * samples, derive_seed(seed, 1));
  r.retried = true;
  return r;
}

double lipschitz_transport_scan(const EmbeddedFunctional& functional, std::size_t pairs, std::uint64_t seed) {
  const KLMeasure& measure = functional.measure();
  const std::size_t J = measure.truncation();
  const auto draws = sample(measure, seed, 2 * pairs);
  Rng rng(derive_seed(seed, streams::kPairs));
  double worst = 0.0;
  auto quotient = [&](const CoordinateSample& u, const CoordinateSample& v) {
    double dist = 0.0;
    for (std::size_t j = 0; j < J; ++j) dist += (u.coefficients[j] - v.coefficients[j]) * (u.coefficients[j] - v.coefficients[j]);
    dist = std::sqrt(dist);
    if (dist > 0.0) worst = std::max(worst, std::abs(functional(u) - functional(v)) / dist);
  };
  for (std::size_t k = 0; k < pairs; ++k) {
    const CoordinateSample& u = draws[2 * k];
    if (k % 2 == 0) {
      quotient(u, draws[2 * k + 1]);
    } else {
      CoordinateSample v = u;
      const double step = 1e-3 * std::sqrt(measure.eigenvalue(functional.dim() - 1));
      for (int j = 0; j < functional.dim(); ++j) v.coefficients[j] += step * (2.0 * rng.uniform() - 1.0);
      quotient(u, v);
    }
  }
  return worst;
}

double ks_statistic_uniform(std::vector<double> values) {
  require(!values.empty(), ErrorCode::InvalidArgument, "KS statistic needs data");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - x, x - i / n});
  }
  return d;
}

}  // namespace lipent
