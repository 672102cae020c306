#include "lipent/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lipent/errors.hpp"
#include "lipent/sampled.hpp"

namespace lipent {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

UnitGridFunction::UnitGridFunction(int dim, int resolution, std::vector<double> values)
    : dim_(dim), resolution_(resolution), values_(std::move(values)) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "unit grid dimension must be 1, 2 or 3");
  require(resolution >= 1, ErrorCode::InvalidArgument, "unit grid resolution must be positive");
  require(values_.size() == ipow(static_cast<std::size_t>(resolution) + 1, dim), ErrorCode::InvalidArgument,
          "unit grid value count does not match (res+1)^d");
  for (double v : values_) require(std::isfinite(v), ErrorCode::InvalidArgument, "unit grid values must be finite");
}

UnitGridFunction UnitGridFunction::sample(int dim, int resolution,
                                          const std::function<double(std::span<const double>)>& f) {
  require(dim >= 1 && dim <= 3 && resolution >= 1, ErrorCode::InvalidArgument, "invalid unit grid shape");
  const std::size_t count = ipow(static_cast<std::size_t>(resolution) + 1, dim);
  std::vector<double> values(count);
  std::vector<double> x(dim);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (int a = 0; a < dim; ++a) {
      x[a] = static_cast<double>(rest % (resolution + 1)) / resolution;
      rest /= resolution + 1;
    }
    values[idx] = f(x);
  }
  return UnitGridFunction(dim, resolution, std::move(values));
}

std::vector<double> UnitGridFunction::node(std::size_t index) const {
  std::vector<double> x(dim_);
  for (int a = 0; a < dim_; ++a) {
    x[a] = static_cast<double>(index % (resolution_ + 1)) / resolution_;
    index /= resolution_ + 1;
  }
  return x;
}

double UnitGridFunction::operator()(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, ErrorCode::InvalidArgument, "point dimension mismatch");
  std::array<std::size_t, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < dim_; ++a) {
    const double t = std::clamp(x[a], 0.0, 1.0) * resolution_;
    std::size_t i = static_cast<std::size_t>(std::floor(t));
    if (i >= static_cast<std::size_t>(resolution_)) i = resolution_ - 1;
    base[a] = i;
    frac[a] = t - static_cast<double>(i);
  }
  const std::size_t stride = resolution_ + 1;
  double total = 0.0;
  for (unsigned corner = 0; corner < (1U << dim_); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    std::size_t scale = 1;
    for (int a = 0; a < dim_; ++a) {
      const bool up = (corner >> a) & 1U;
      w *= up ? frac[a] : 1.0 - frac[a];
      idx += (base[a] + (up ? 1 : 0)) * scale;
      scale *= stride;
    }
    if (w != 0.0) total += w * values_[idx];
  }
  return total;
}

double UnitGridFunction::integrate_abs_pow(double p) const {
  require(p >= 1.0, ErrorCode::InvalidArgument, "integration exponent must be >= 1");
  static constexpr std::array<double, 3> kNodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> kWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = 1.0 / resolution_;
  const std::size_t cells = ipow(resolution_, dim_);
  const std::size_t points = ipow(3, dim_);
  CompensatedSum total;
  std::vector<double> x(dim_);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    std::array<double, 3> lo{};
    for (int a = 0; a < dim_; ++a) {
      lo[a] = static_cast<double>(rest % resolution_) * h;
      rest /= resolution_;
    }
    double cell = 0.0;
    for (std::size_t q = 0; q < points; ++q) {
      std::size_t qr = q;
      double w = 1.0;
      for (int a = 0; a < dim_; ++a) {
        const std::size_t k = qr % 3;
        qr /= 3;
        x[a] = lo[a] + 0.5 * h * (1.0 + kNodes[k]);
        w *= 0.5 * kWeights[k];
      }
      cell += w * std::pow(std::abs((*this)(x)), p);
    }
    total.add(cell);
  }
  return total.value() * std::pow(h, dim_);
}

double UnitGridFunction::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace lipent
