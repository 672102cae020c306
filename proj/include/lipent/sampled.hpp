#pragma once

#include <span>
#include <string>
#include <vector>

namespace lipent {

/// A real-valued map known only on a declared finite sample of its domain.
/// Two functionals are comparable iff they name the same sample set and have
/// the same number of values.
struct SampledFunctional {
  std::string sample_set;
  std::vector<double> values;
};

/// Distance between sampled functionals: the sup norm, or a weighted
/// discrete L^p norm (sum_i w_i |f_i - g_i|^p)^{1/p}.
class FunctionNorm {
 public:
  enum class Kind { Sup, Lp };

  static FunctionNorm sup() { return FunctionNorm(Kind::Sup, 1.0, {}); }
  static FunctionNorm lp(double p, std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }

  double distance(std::span<const double> a, std::span<const double> b) const;
  double distance(const SampledFunctional& a, const SampledFunctional& b) const;

 private:
  FunctionNorm(Kind kind, double p, std::vector<double> weights)
      : kind_(kind), p_(p), weights_(std::move(weights)) {}

  Kind kind_;
  double p_;
  std::vector<double> weights_;
};

void check_same_samples(const SampledFunctional& a, const SampledFunctional& b);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace lipent
