#include "lipent/metricspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "lipent/errors.hpp"
#include "lipent/rng.hpp"

namespace lipent {

namespace {

using Mask = std::uint32_t;

bool within(double d, double eps) { return d <= eps + kMetricTolerance; }
bool separated(double d, double eps) { return d >= eps - kMetricTolerance; }

void check_indices(const FiniteMetricSpace& space, const IndexSet& set, const char* what) {
  for (std::size_t i : set)
    require(i < space.size(), ErrorCode::InvalidArgument, std::string(what) + " index out of range");
}

void check_eps(double eps) {
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "radius must be positive and finite");
}

// Branch and bound for minimum set cover over a universe of <= 20 elements.
class SetCoverSearch {
 public:
  SetCoverSearch(std::vector<Mask> sets, std::vector<std::size_t> labels, Mask universe)
      : sets_(std::move(sets)), labels_(std::move(labels)), universe_(universe) {}

  std::vector<std::size_t> solve(std::vector<std::size_t> upper_bound) {
    best_ = std::move(upper_bound);
    std::vector<std::size_t> chosen;
    search(universe_, chosen);
    return best_;
  }

 private:
  void search(Mask uncovered, std::vector<std::size_t>& chosen) {
    if (uncovered == 0) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    int widest = 0;
    for (Mask s : sets_) widest = std::max(widest, std::popcount(s & uncovered));
    const std::size_t lower = chosen.size() + (std::popcount(uncovered) + widest - 1) / widest;
    if (lower >= best_.size()) return;

    // Branch on the uncovered element with the fewest covering sets.
    int pivot = -1;
    int fewest = INT32_MAX;
    for (Mask rest = uncovered; rest != 0; rest &= rest - 1) {
      const int e = std::countr_zero(rest);
      int options = 0;
      for (Mask s : sets_) options += (s >> e) & 1U;
      if (options < fewest) {
        fewest = options;
        pivot = e;
      }
    }
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < sets_.size(); ++k)
      if ((sets_[k] >> pivot) & 1U) order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::popcount(sets_[a] & uncovered) > std::popcount(sets_[b] & uncovered);
    });
    for (std::size_t k : order) {
      chosen.push_back(labels_[k]);
      search(uncovered & ~sets_[k], chosen);
      chosen.pop_back();
    }
  }

  std::vector<Mask> sets_;
  std::vector<std::size_t> labels_;
  Mask universe_;
  std::vector<std::size_t> best_;
};

// Branch and bound for a maximum independent set in a graph on <= 20 vertices.
class IndependentSetSearch {
 public:
  explicit IndependentSetSearch(std::vector<Mask> conflicts) : conflicts_(std::move(conflicts)) {}

  Mask solve(Mask candidates) {
    search(candidates, 0);
    return best_;
  }

 private:
  void search(Mask candidates, Mask current) {
    if (std::popcount(current) + std::popcount(candidates) <= std::popcount(best_)) return;
    if (candidates == 0) {
      best_ = current;
      return;
    }
    const int v = std::countr_zero(candidates);
    const Mask bit = Mask{1} << v;
    search(candidates & ~bit & ~conflicts_[v], current | bit);
    if ((conflicts_[v] & candidates) != 0) search(candidates & ~bit, current);
  }

  std::vector<Mask> conflicts_;
  Mask best_ = 0;
};

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> points, std::vector<std::vector<double>> dist)
    : points_(std::move(points)) {
  const std::size_t n = points_.size();
  require(n > 0, ErrorCode::InvalidArgument, "metric space must have at least one point");
  require(dist.size() == n, ErrorCode::InvalidArgument, "distance matrix row count != point count");
  dist_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    require(dist[i].size() == n, ErrorCode::InvalidArgument, "distance matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist[i][j];
      require(std::isfinite(d) && d >= -kMetricTolerance, ErrorCode::InvalidArgument,
              "distances must be finite and nonnegative");
      dist_[i * n + j] = std::max(d, 0.0);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(std::abs(dist_[i * n + i]) <= kMetricTolerance, ErrorCode::InvalidArgument,
            "distance matrix must have zero diagonal");
    dist_[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(dist_[i * n + j] - dist_[j * n + i]) <= kMetricTolerance, ErrorCode::InvalidArgument,
              "distance matrix must be symmetric");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        require(dist_[i * n + k] <= dist_[i * n + j] + dist_[j * n + k] + kMetricTolerance,
                ErrorCode::InvalidArgument, "distance matrix violates the triangle inequality");
}

FiniteMetricSpace FiniteMetricSpace::from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("points") && j.contains("dist"), ErrorCode::InvalidArgument,
          "metric space JSON needs 'points' and 'dist'");
  for (const auto& [key, value] : j.items())
    require(key == "points" || key == "dist", ErrorCode::InvalidArgument, "unknown metric space key '" + key + "'");
  std::vector<std::string> points;
  for (const auto& p : j.at("points")) points.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  return FiniteMetricSpace(std::move(points), j.at("dist").get<std::vector<std::vector<double>>>());
}

nlohmann::json FiniteMetricSpace::to_json() const {
  std::vector<std::vector<double>> rows(size(), std::vector<double>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) rows[i][j] = (*this)(i, j);
  return {{"points", points_}, {"dist", rows}};
}

FiniteMetricSpace FiniteMetricSpace::euclidean(const std::vector<std::vector<double>>& coords) {
  const std::size_t n = coords.size();
  std::vector<std::string> names;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      require(coords[i].size() == coords[j].size(), ErrorCode::InvalidArgument, "coordinate dimensions differ");
      double s = 0.0;
      for (std::size_t a = 0; a < coords[i].size(); ++a) s += (coords[i][a] - coords[j][a]) * (coords[i][a] - coords[j][a]);
      dist[i][j] = std::sqrt(s);
    }
  }
  return FiniteMetricSpace(std::move(names), std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::line(std::size_t count, double spacing) {
  std::vector<std::vector<double>> coords;
  for (std::size_t i = 0; i < count; ++i) coords.push_back({spacing * static_cast<double>(i)});
  return euclidean(coords);
}

FiniteMetricSpace FiniteMetricSpace::circle(std::size_t count, double circumference) {
  require(count > 0 && circumference > 0.0, ErrorCode::InvalidArgument, "circle needs points and a positive circumference");
  const double step = circumference / static_cast<double>(count);
  std::vector<std::string> names;
  std::vector<std::vector<double>> dist(count, std::vector<double>(count, 0.0));
  for (std::size_t i = 0; i < count; ++i) {
    names.push_back(std::to_string(i));
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      dist[i][j] = step * static_cast<double>(std::min(gap, count - gap));
    }
  }
  return FiniteMetricSpace(std::move(names), std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::random_plane(std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, streams::kSpace));
  std::vector<std::vector<double>> coords;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    coords.push_back({x, y});
  }
  return euclidean(coords);
}

IndexSet FiniteMetricSpace::all() const {
  IndexSet out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = i;
  return out;
}

double FiniteMetricSpace::diameter(const IndexSet& subset) const {
  double d = 0.0;
  for (std::size_t i : subset)
    for (std::size_t j : subset) d = std::max(d, (*this)(i, j));
  return d;
}

bool covers(const FiniteMetricSpace& space, const IndexSet& subset, const IndexSet& centers, double eps) {
  return std::all_of(subset.begin(), subset.end(), [&](std::size_t p) {
    return std::any_of(centers.begin(), centers.end(), [&](std::size_t c) { return within(space(p, c), eps); });
  });
}

bool is_packing(const FiniteMetricSpace& space, const IndexSet& members, double eps) {
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      if (!separated(space(members[a], members[b]), eps)) return false;
  return true;
}

CoverResult greedy_covering(const FiniteMetricSpace& space, const IndexSet& subset, const IndexSet& ambient,
                            double eps) {
  check_eps(eps);
  check_indices(space, subset, "subset");
  check_indices(space, ambient, "ambient");
  CoverResult result{{}, eps, 0};
  if (subset.empty()) return result;
  require(!ambient.empty(), ErrorCode::InvalidArgument, "ambient set is empty");

  std::vector<bool> covered(subset.size(), false);
  std::size_t remaining = subset.size();
  while (remaining > 0) {
    std::size_t best_center = 0;
    std::size_t best_gain = 0;
    bool found = false;
    for (std::size_t c : ambient) {
      std::size_t gain = 0;
      for (std::size_t k = 0; k < subset.size(); ++k)
        if (!covered[k] && within(space(subset[k], c), eps)) ++gain;
      if (gain > best_gain || (gain == best_gain && gain > 0 && found && c < best_center)) {
        best_gain = gain;
        best_center = c;
        found = true;
      }
    }
    require(found, ErrorCode::InvalidArgument, "some subset point is not within eps of any ambient point");
    for (std::size_t k = 0; k < subset.size(); ++k)
      if (!covered[k] && within(space(subset[k], best_center), eps)) {
        covered[k] = true;
        --remaining;
      }
    result.centers.push_back(best_center);
  }
  result.count = result.centers.size();
  return result;
}

CoverResult exact_covering_number(const FiniteMetricSpace& space, const IndexSet& subset, const IndexSet& ambient,
                                  double eps) {
  check_eps(eps);
  check_indices(space, subset, "subset");
  check_indices(space, ambient, "ambient");
  if (subset.size() > kExactLimit)
    fail(ErrorCode::SizeLimitExceeded, "exact covering limited to " + std::to_string(kExactLimit) +
                                           " points; use greedy_covering");
  CoverResult result{{}, eps, 0};
  if (subset.empty()) return result;

  // One bitmask per ambient candidate; drop duplicates and dominated balls,
  // keeping the lowest index for reproducible centers.
  IndexSet sorted_ambient = ambient;
  std::sort(sorted_ambient.begin(), sorted_ambient.end());
  sorted_ambient.erase(std::unique(sorted_ambient.begin(), sorted_ambient.end()), sorted_ambient.end());
  std::vector<Mask> masks;
  std::vector<std::size_t> labels;
  for (std::size_t c : sorted_ambient) {
    Mask m = 0;
    for (std::size_t k = 0; k < subset.size(); ++k)
      if (within(space(subset[k], c), eps)) m |= Mask{1} << k;
    if (m != 0) {
      masks.push_back(m);
      labels.push_back(c);
    }
  }
  std::vector<Mask> kept_masks;
  std::vector<std::size_t> kept_labels;
  for (std::size_t a = 0; a < masks.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < masks.size() && !dominated; ++b) {
      if (a == b) continue;
      const bool subset_of_b = (masks[a] & ~masks[b]) == 0;
      dominated = subset_of_b && (masks[a] != masks[b] || b < a);
    }
    if (!dominated) {
      kept_masks.push_back(masks[a]);
      kept_labels.push_back(labels[a]);
    }
  }
  const Mask universe = subset.size() == 32 ? ~Mask{0} : (Mask{1} << subset.size()) - 1;
  Mask reachable = 0;
  for (Mask m : kept_masks) reachable |= m;
  require(reachable == universe, ErrorCode::InvalidArgument, "some subset point is not within eps of any ambient point");

  CoverResult greedy = greedy_covering(space, subset, ambient, eps);
  SetCoverSearch search(kept_masks, kept_labels, universe);
  IndexSet centers = search.solve(greedy.centers);
  std::sort(centers.begin(), centers.end());
  result.centers = std::move(centers);
  result.count = result.centers.size();
  return result;
}

PackResult greedy_packing(const FiniteMetricSpace& space, const IndexSet& subset, double eps) {
  check_eps(eps);
  check_indices(space, subset, "subset");
  PackResult result{{}, eps, 0};
  for (std::size_t p : subset) {
    const bool ok = std::all_of(result.members.begin(), result.members.end(),
                                [&](std::size_t m) { return separated(space(p, m), eps); });
    if (ok) result.members.push_back(p);
  }
  result.count = result.members.size();
  return result;
}

PackResult exact_packing_number(const FiniteMetricSpace& space, const IndexSet& subset, double eps) {
  check_eps(eps);
  check_indices(space, subset, "subset");
  if (subset.size() > kExactLimit)
    fail(ErrorCode::SizeLimitExceeded, "exact packing limited to " + std::to_string(kExactLimit) +
                                           " points; use greedy_packing");
  PackResult result{{}, eps, 0};
  if (subset.empty()) return result;
  std::vector<Mask> conflicts(subset.size(), 0);
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = 0; b < subset.size(); ++b)
      if (a != b && !separated(space(subset[a], subset[b]), eps)) conflicts[a] |= Mask{1} << b;
  const Mask all = (Mask{1} << subset.size()) - 1;
  IndependentSetSearch search(conflicts);
  const Mask best = search.solve(all);
  for (std::size_t k = 0; k < subset.size(); ++k)
    if ((best >> k) & 1U) result.members.push_back(subset[k]);
  result.count = result.members.size();
  return result;
}

SandwichReport sandwich_check(const FiniteMetricSpace& space, const IndexSet& subset, const IndexSet& ambient,
                              double eps) {
  SandwichReport r;
  r.packing_3eps = exact_packing_number(space, subset, 3.0 * eps).count;
  r.covering = exact_covering_number(space, subset, ambient, eps).count;
  r.packing = exact_packing_number(space, subset, eps).count;
  r.holds = r.packing_3eps <= r.covering && r.covering <= r.packing;
  return r;
}

unsigned bits_for(std::uint64_t count) {
  require(count > 0, ErrorCode::InvalidArgument, "a code needs at least one codeword");
  return count == 1 ? 0U : static_cast<unsigned>(std::bit_width(count - 1));
}

CodeLengthReport minimax_code_length(const FiniteMetricSpace& space, const IndexSet& subset, const IndexSet& ambient,
                                     double eps) {
  require(!subset.empty(), ErrorCode::InvalidArgument, "code length of an empty set is undefined");
  CodeLengthReport r;
  r.covering = exact_covering_number(space, subset, ambient, eps).count;
  r.entropy = std::log2(static_cast<double>(r.covering));
  r.bits = bits_for(r.covering);
  r.covering_restricted = exact_covering_number(space, subset, subset, eps).count;
  r.bits_restricted = bits_for(r.covering_restricted);
  return r;
}

double dictionary_minimax_error(std::span<const SampledFunctional> cls, std::span<const SampledFunctional> dictionary,
                                const FunctionNorm& norm) {
  require(!dictionary.empty(), ErrorCode::InvalidArgument, "dictionary is empty");
  for (const auto& f : cls) check_same_samples(f, dictionary.front());
  for (const auto& g : dictionary) check_same_samples(g, dictionary.front());
  double worst = 0.0;
  for (const auto& f : cls) {
    double nearest = INFINITY;
    for (const auto& g : dictionary) nearest = std::min(nearest, norm.distance(f, g));
    worst = std::max(worst, nearest);
  }
  return worst;
}

FiniteMetricSpace space_of_functionals(std::span<const SampledFunctional> functionals, const FunctionNorm& norm) {
  const std::size_t n = functionals.size();
  std::vector<std::string> names;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = norm.distance(functionals[i], functionals[j]);
  }
  return FiniteMetricSpace(std::move(names), std::move(dist));
}

}  // namespace lipent
