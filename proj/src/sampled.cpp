#include "lipent/sampled.hpp"

#include <algorithm>
#include <cmath>

#include "lipent/errors.hpp"

namespace lipent {

FunctionNorm FunctionNorm::lp(double p, std::vector<double> weights) {
  require(p >= 1.0 && std::isfinite(p), ErrorCode::InvalidArgument, "L^p norm requires finite p >= 1");
  for (double w : weights)
    require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidArgument, "L^p weights must be nonnegative");
  return FunctionNorm(Kind::Lp, p, std::move(weights));
}

double FunctionNorm::distance(std::span<const double> a, std::span<const double> b) const {
  require(a.size() == b.size(), ErrorCode::SampleMismatch, "functionals have different sample counts");
  if (kind_ == Kind::Sup) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
  }
  require(weights_.size() == a.size(), ErrorCode::SampleMismatch, "L^p weights do not match the sample count");
  CompensatedSum total;
  for (std::size_t i = 0; i < a.size(); ++i) total.add(weights_[i] * std::pow(std::abs(a[i] - b[i]), p_));
  return std::pow(total.value(), 1.0 / p_);
}

double FunctionNorm::distance(const SampledFunctional& a, const SampledFunctional& b) const {
  check_same_samples(a, b);
  return distance(std::span<const double>(a.values), std::span<const double>(b.values));
}

void check_same_samples(const SampledFunctional& a, const SampledFunctional& b) {
  if (a.sample_set != b.sample_set || a.values.size() != b.values.size())
    fail(ErrorCode::SampleMismatch,
         "sample sets differ ('" + a.sample_set + "' vs '" + b.sample_set + "')");
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    correction_ += (sum_ - t) + x;
  else
    correction_ += (x - t) + sum_;
  sum_ = t;
}

}  // namespace lipent
