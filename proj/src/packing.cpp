#include "lipent/packing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "lipent/errors.hpp"
#include "lipent/rng.hpp"

namespace lipent {

// ---------------------------------------------------------------------------
// Hat family

HatFamily::HatFamily(const FiniteMetricSpace& space, IndexSet centers, double eps)
    : centers_(std::move(centers)), eps_(eps), samples_(space.size()) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "hat family needs eps > 0");
  require(centers_.size() <= kMaxHatCenters, ErrorCode::FamilyTooLarge,
          "hat family with " + std::to_string(centers_.size()) + " centers exceeds 2^16 members");
  for (std::size_t c : centers_) require(c < space.size(), ErrorCode::InvalidArgument, "hat center out of range");
  for (std::size_t c : centers_) {
    std::vector<double> hat(space.size());
    for (std::size_t u = 0; u < space.size(); ++u) hat[u] = std::max(3.0 * eps_ - space(u, c), 0.0);
    hats_.push_back(std::move(hat));
  }
}

std::vector<double> HatFamily::evaluate(std::uint64_t sigma) const {
  require(sigma < size(), ErrorCode::InvalidArgument, "hat family member index out of range");
  std::vector<double> values(samples_, 0.0);
  for (std::size_t j = 0; j < centers_.size(); ++j)
    if ((sigma >> j) & 1U)
      for (std::size_t u = 0; u < samples_; ++u) values[u] += hats_[j][u];
  return values;
}

SampledFunctional HatFamily::member(std::uint64_t sigma, const std::string& sample_set) const {
  return {sample_set, evaluate(sigma)};
}

double HatFamily::sup_distance(std::uint64_t a, std::uint64_t b) const {
  const auto fa = evaluate(a);
  const auto fb = evaluate(b);
  return FunctionNorm::sup().distance(fa, fb);
}

nlohmann::json HatFamily::manifest() const {
  return {{"kind", "hat"},
          {"eps", eps_},
          {"centers", centers_},
          {"center_count", centers_.size()},
          {"members", size()},
          {"sigma_encoding", "bit j of the member index is sigma_j"}};
}

HatFamily build_hat_family(const FiniteMetricSpace& space, double eps) {
  require(eps > 0.0 && eps <= 1.0 / 3.0 + 1e-15, ErrorCode::InvalidArgument, "hat family needs eps in (0, 1/3]");
  const PackResult packing = space.size() <= kExactLimit ? exact_packing_number(space, space.all(), 6.0 * eps)
                                                         : greedy_packing(space, space.all(), 6.0 * eps);
  require(packing.count >= 2, ErrorCode::NoPacking, "no two points are 6 eps-separated");
  require(packing.count <= kMaxHatCenters, ErrorCode::FamilyTooLarge,
          "6 eps-packing has " + std::to_string(packing.count) + " centers; 2^N exceeds 2^16");
  return HatFamily(space, packing.members, eps);
}

HatVerification verify_hat_family(const HatFamily& family, const FiniteMetricSpace& space, std::uint64_t seed) {
  require(family.sample_count() == space.size(), ErrorCode::SampleMismatch, "family was built on another space");
  HatVerification v;
  const std::uint64_t members = family.size();
  std::vector<std::vector<double>> values(members);
  for (std::uint64_t s = 0; s < members; ++s) values[s] = family.evaluate(s);

  for (const auto& f : values) {
    for (std::size_t u = 0; u < f.size(); ++u) {
      v.max_sup = std::max(v.max_sup, std::abs(f[u]));
      for (std::size_t w = u + 1; w < f.size(); ++w)
        if (space(u, w) > 0.0) v.max_lipschitz = std::max(v.max_lipschitz, std::abs(f[u] - f[w]) / space(u, w));
    }
  }

  const FunctionNorm sup = FunctionNorm::sup();
  v.min_pair_distance = INFINITY;
  v.exhaustive = members <= (std::uint64_t{1} << 10);
  if (v.exhaustive) {
    for (std::uint64_t a = 0; a < members; ++a)
      for (std::uint64_t b = a + 1; b < members; ++b) {
        v.min_pair_distance = std::min(v.min_pair_distance, sup.distance(values[a], values[b]));
        ++v.pairs_checked;
      }
  } else {
    Rng rng(derive_seed(seed, streams::kVerify));
    while (v.pairs_checked < 1000) {
      const std::uint64_t a = rng.below(members);
      const std::uint64_t b = rng.below(members);
      if (a == b) continue;
      v.min_pair_distance = std::min(v.min_pair_distance, sup.distance(values[a], values[b]));
      ++v.pairs_checked;
    }
  }
  const double eps = family.eps();
  v.ok = v.max_sup <= 3.0 * eps + kMetricTolerance && 3.0 * eps <= 1.0 + kMetricTolerance &&
         v.max_lipschitz <= 1.0 + 1e-12 && v.min_pair_distance >= 3.0 * eps - kMetricTolerance;
  return v;
}

double entropy_lower_bound_uniform(double entropy_k_6eps) {
  require(entropy_k_6eps >= 0.0, ErrorCode::InvalidArgument, "entropy must be nonnegative");
  return std::exp2(entropy_k_6eps);
}

// ---------------------------------------------------------------------------
// Sign codes

int SignCode::min_distance() const {
  int best = length + 1;
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) best = std::min(best, std::popcount(words[a] ^ words[b]));
  return best;
}

nlohmann::json SignCode::manifest() const {
  std::vector<std::string> rows;
  for (std::uint64_t w : words) {
    std::string s;
    for (int i = 0; i < length; ++i) s.push_back(((w >> i) & 1U) ? '-' : '+');
    rows.push_back(std::move(s));
  }
  return {{"kind", "gilbert_varshamov"},
          {"length", length},
          {"required_distance", required_distance},
          {"target_size", target_size},
          {"size", words.size()},
          {"min_distance", min_distance()},
          {"words", rows}};
}

SignCode gilbert_varshamov(int length) {
  require(length >= 1 && length <= kMaxCodeLength, ErrorCode::InvalidArgument,
          "sign code length must lie in [1, " + std::to_string(kMaxCodeLength) + "]");
  SignCode code;
  code.length = length;
  code.required_distance = (length + 3) / 4;
  code.target_size = static_cast<std::uint64_t>(std::ceil(std::exp(length / 8.0)));
  const std::uint64_t last = (std::uint64_t{1} << length) - 1;
  for (std::uint64_t x = 0;; ++x) {
    const bool keep = std::all_of(code.words.begin(), code.words.end(),
                                  [&](std::uint64_t w) { return std::popcount(w ^ x) >= code.required_distance; });
    if (keep) {
      code.words.push_back(x);
      if (code.words.size() >= code.target_size) break;
    }
    if (x == last) break;
  }
  require(code.words.size() >= code.target_size, ErrorCode::BoundNotReached,
          "greedy scan exhausted before reaching ceil(e^{n/8}) words");
  return code;
}

// ---------------------------------------------------------------------------
// Bump family

namespace {

double plateau_ramp(double t, double lambda) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double half = 0.5 * lambda;
  if (t < half) return t / half;
  if (t > 1.0 - half) return (1.0 - t) / half;
  return 1.0;
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

constexpr std::size_t kAllPairsNodeLimit = 8192;

}  // namespace

BumpFamily::BumpFamily(int dim, int subdivisions, int grid_resolution, SignCode code, double lambda)
    : dim_(dim), subdivisions_(subdivisions), grid_resolution_(grid_resolution), code_(std::move(code)),
      lambda_(lambda) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "bump family dimension must be 1, 2 or 3");
  require(subdivisions >= 2, ErrorCode::InvalidArgument, "bump family needs N >= 2");
  require(lambda > 0.0 && lambda < 1.0, ErrorCode::InvalidArgument, "plateau parameter must lie in (0, 1)");
  require(code_.length == static_cast<int>(ipow(subdivisions, dim)), ErrorCode::InvalidArgument,
          "sign code length must equal N^d");
  require(!code_.words.empty(), ErrorCode::InvalidArgument, "sign code is empty");
  const double breakpoints = 0.5 * lambda * grid_resolution / subdivisions;
  require(grid_resolution > 0 && grid_resolution % subdivisions == 0 &&
              std::abs(breakpoints - std::round(breakpoints)) <= 1e-9 && std::round(breakpoints) >= 1.0,
          ErrorCode::GridMisaligned, "plateau breakpoints do not land on grid nodes");
}

int BumpFamily::cube_of(double coordinate) const {
  const int c = static_cast<int>(std::floor(coordinate * subdivisions_));
  return std::clamp(c, 0, subdivisions_ - 1);
}

double BumpFamily::bump(std::span<const double> x) const {
  double value = 1.0;
  for (double t : x) value = std::min(value, plateau_ramp(t, lambda_));
  return value;
}

double BumpFamily::evaluate(std::size_t member, std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, ErrorCode::InvalidArgument, "point dimension mismatch");
  require(member < size(), ErrorCode::InvalidArgument, "bump family member out of range");
  std::size_t cube = 0;
  std::size_t scale = 1;
  double local[3];
  for (int a = 0; a < dim_; ++a) {
    const double xa = std::clamp(x[a], 0.0, 1.0);
    const int c = cube_of(xa);
    local[a] = xa * subdivisions_ - c;
    cube += static_cast<std::size_t>(c) * scale;
    scale *= subdivisions_;
  }
  return amplitude() * code_.sign(member, static_cast<int>(cube)) * bump(std::span<const double>(local, dim_));
}

UnitGridFunction BumpFamily::grid_member(std::size_t member) const {
  return UnitGridFunction::sample(dim_, grid_resolution_,
                                  [&](std::span<const double> x) { return evaluate(member, x); });
}

double BumpFamily::l1_distance(std::size_t a, std::size_t b) const {
  const std::size_t cells = ipow(grid_resolution_, dim_);
  const double h = 1.0 / grid_resolution_;
  CompensatedSum total;
  double x[3];
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (int k = 0; k < dim_; ++k) {
      x[k] = (static_cast<double>(rest % grid_resolution_) + 0.5) * h;
      rest /= grid_resolution_;
    }
    const std::span<const double> p(x, dim_);
    total.add(std::abs(evaluate(a, p) - evaluate(b, p)));
  }
  return total.value() * std::pow(h, dim_);
}

double BumpFamily::bump_l1_quadrature() const {
  // phi_lambda on the unit cube, sampled at the same relative resolution as one subcube.
  const int res = grid_resolution_ / subdivisions_;
  const std::size_t cells = ipow(res, dim_);
  const double h = 1.0 / res;
  CompensatedSum total;
  double x[3];
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (int k = 0; k < dim_; ++k) {
      x[k] = (static_cast<double>(rest % res) + 0.5) * h;
      rest /= res;
    }
    total.add(bump(std::span<const double>(x, dim_)));
  }
  return total.value() * std::pow(h, dim_);
}

double BumpFamily::discrete_lipschitz(std::size_t member) const {
  const UnitGridFunction f = grid_member(member);
  const auto& v = f.values();
  const std::size_t nodes = v.size();
  const std::size_t stride = grid_resolution_ + 1;
  double best = 0.0;
  if (grid_resolution_ <= 64 && nodes <= kAllPairsNodeLimit) {
    std::vector<std::vector<double>> coords(nodes);
    for (std::size_t i = 0; i < nodes; ++i) coords[i] = f.node(i);
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t j = i + 1; j < nodes; ++j) {
        double dist = 0.0;
        for (int a = 0; a < dim_; ++a) dist = std::max(dist, std::abs(coords[i][a] - coords[j][a]));
        best = std::max(best, std::abs(v[i] - v[j]) / dist);
      }
    return best;
  }
  const double h = 1.0 / grid_resolution_;
  for (std::size_t i = 0; i < nodes; ++i) {
    std::size_t rest = i;
    std::size_t scale = 1;
    for (int a = 0; a < dim_; ++a) {
      const std::size_t ia = rest % stride;
      rest /= stride;
      if (ia + 1 < stride) best = std::max(best, std::abs(v[i + scale] - v[i]) / h);
      scale *= stride;
    }
  }
  return best;
}

double BumpFamily::separation_bound() const {
  return 1.0 / (8.0 * std::numbers::e * dim_ * subdivisions_);
}

nlohmann::json BumpFamily::manifest() const {
  return {{"kind", "bump"},
          {"d", dim_},
          {"N", subdivisions_},
          {"grid", grid_resolution_},
          {"lambda", lambda_},
          {"amplitude", amplitude()},
          {"members", size()},
          {"code", code_.manifest()}};
}

double bump_l1_closed_form(int dim, double lambda) {
  return (1.0 - std::pow(1.0 - lambda, dim + 1)) / (lambda * (dim + 1));
}

BumpFamily build_bump_family(int dim, int subdivisions, int grid_resolution, SignCode code) {
  return build_bump_family(dim, subdivisions, grid_resolution, std::move(code), 1.0 / (1.0 + dim));
}

BumpFamily build_bump_family(int dim, int subdivisions, int grid_resolution, SignCode code, double lambda) {
  return BumpFamily(dim, subdivisions, grid_resolution, std::move(code), lambda);
}

BumpVerification verify_bump_family(const BumpFamily& family, double tolerance) {
  BumpVerification v;
  v.separation_bound = family.separation_bound();
  v.min_pair_l1 = INFINITY;
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b) v.min_pair_l1 = std::min(v.min_pair_l1, family.l1_distance(a, b));
  v.measured_constant = v.min_pair_l1 * 8.0 * std::numbers::e * family.dim() * family.subdivisions();
  for (std::size_t m = 0; m < family.size(); ++m) {
    v.max_sup = std::max(v.max_sup, family.grid_member(m).sup_abs());
    v.max_lipschitz = std::max(v.max_lipschitz, family.discrete_lipschitz(m));
  }
  v.bump_l1 = family.bump_l1_quadrature();
  v.bump_l1_lower = std::pow(1.0 - family.lambda(), family.dim());
  v.ok = v.min_pair_l1 >= v.separation_bound - tolerance && v.max_sup <= 1.0 + tolerance &&
         v.max_lipschitz <= 1.0 + tolerance && v.bump_l1 >= v.bump_l1_lower - tolerance;
  return v;
}

// ---------------------------------------------------------------------------
// Dimension selection

DimensionChoice select_embedding_dimension(double eps, double c1, double c2, double alpha) {
  require(c1 > 0.0 && c2 > 0.0 && alpha > 0.0, ErrorCode::InvalidArgument, "c1, c2, alpha must be positive");
  require(c2 <= c1, ErrorCode::InvalidArgument, "need c2 <= c1 so that beta = -log(c2/c1) >= 0");
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  require(eps <= c2, ErrorCode::EpsilonTooLarge, "eps exceeds eps_0 = c2");

  using ld = long double;
  const ld e = eps, a1 = 1.0L + alpha;
  const ld threshold = static_cast<ld>(c2);  // c1 e^{-beta}
  auto fits = [&](ld d) { return e * std::pow(d, a1) <= threshold * (1.0L + 1e-12L); };
  ld d = std::floor(std::pow(threshold / e, 1.0L / a1));
  d = std::max(d, 1.0L);
  while (fits(d + 1)) d += 1;
  while (d > 1 && !fits(d)) d -= 1;

  DimensionChoice c;
  c.d = static_cast<int>(d);
  const ld beta = -std::log(static_cast<ld>(c2) / static_cast<ld>(c1));
  c.beta = static_cast<double>(beta);
  c.lower_inequality = fits(d);
  c.upper_inequality = threshold < e * std::pow(2 * d, a1);
  c.dd1 = e <= static_cast<ld>(c2) * std::pow(d, -a1) * (1.0L + 1e-12L);
  c.dd2 = static_cast<ld>(c1) / (std::pow(d, a1) * e) >= std::exp(beta) * (1.0L - 1e-12L);
  const ld tight = beta * std::pow(static_cast<ld>(c1) / (std::pow(2.0L, a1) * std::exp(beta)), 1.0L / a1);
  const ld loose = beta * std::pow(static_cast<ld>(c1) / (2.0L * std::exp(beta)), 1.0L / a1);
  c.dd3 = beta * d >= tight * std::pow(e, -1.0L / a1) * (1.0L - 1e-15L);
  c.dd3_loose_constant = beta * d >= loose * std::pow(e, -1.0L / a1) * (1.0L - 1e-15L);
  return c;
}

}  // namespace lipent
