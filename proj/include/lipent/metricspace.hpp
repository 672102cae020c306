#pragma once

// Covering and packing numbers, metric entropy and minimax code length on
// explicit finite metric spaces. All balls are closed: a point at distance
// exactly eps from a center is covered, and a pair at distance exactly eps is
// eps-separated.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipent/sampled.hpp"

namespace lipent {

using IndexSet = std::vector<std::size_t>;

/// Largest subset size handled by the exact set-cover / independent-set search.
inline constexpr std::size_t kExactLimit = 20;

/// Absolute tolerance used for metric validation and for distance-vs-radius ties.
inline constexpr double kMetricTolerance = 1e-12;

class FiniteMetricSpace {
 public:
  /// Validates symmetry, zero diagonal, nonnegativity and the triangle
  /// inequality (tolerance kMetricTolerance); throws InvalidArgument otherwise.
  FiniteMetricSpace(std::vector<std::string> points, std::vector<std::vector<double>> dist);

  static FiniteMetricSpace from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Euclidean distances between the given coordinate vectors.
  static FiniteMetricSpace euclidean(const std::vector<std::vector<double>>& coords);
  /// Points 0, spacing, 2*spacing, ... on the real line.
  static FiniteMetricSpace line(std::size_t count, double spacing = 1.0);
  /// Equispaced points on a circle of the given circumference, arc-length metric.
  static FiniteMetricSpace circle(std::size_t count, double circumference);
  /// Uniform random points in [0,1]^2 with the Euclidean metric.
  static FiniteMetricSpace random_plane(std::size_t count, std::uint64_t seed);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<std::string>& points() const noexcept { return points_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * size() + j]; }
  IndexSet all() const;
  double diameter(const IndexSet& subset) const;
  double diameter() const { return diameter(all()); }

 private:
  std::vector<std::string> points_;
  std::vector<double> dist_;
};

struct CoverResult {
  IndexSet centers;
  double radius = 0.0;
  std::size_t count = 0;
};

struct PackResult {
  IndexSet members;
  double separation = 0.0;
  std::size_t count = 0;
};

bool covers(const FiniteMetricSpace& space, const IndexSet& subset, const IndexSet& centers, double eps);
bool is_packing(const FiniteMetricSpace& space, const IndexSet& members, double eps);

/// Minimum number of closed eps-balls centered in `ambient` covering `subset`.
/// Throws SizeLimitExceeded when |subset| > kExactLimit.
CoverResult exact_covering_number(const FiniteMetricSpace& space, const IndexSet& subset,
                                  const IndexSet& ambient, double eps);

/// Greedy cover: repeatedly takes the ambient point covering the most
/// uncovered points, ties to the lowest index.
CoverResult greedy_covering(const FiniteMetricSpace& space, const IndexSet& subset,
                            const IndexSet& ambient, double eps);

/// Maximum eps-separated subset of `subset`. Throws SizeLimitExceeded when
/// |subset| > kExactLimit.
PackResult exact_packing_number(const FiniteMetricSpace& space, const IndexSet& subset, double eps);

/// Scan `subset` in order, keeping a point iff it is eps-separated from all kept points.
PackResult greedy_packing(const FiniteMetricSpace& space, const IndexSet& subset, double eps);

struct SandwichReport {
  std::size_t packing_3eps = 0;
  std::size_t covering = 0;
  std::size_t packing = 0;
  bool holds = false;
};

/// M(A;3eps) <= N(A;eps) <= M(A;eps), computed exactly.
SandwichReport sandwich_check(const FiniteMetricSpace& space, const IndexSet& subset,
                              const IndexSet& ambient, double eps);

/// ceil(log2(count)), with 0 bits for a single codeword.
unsigned bits_for(std::uint64_t count);

struct CodeLengthReport {
  std::size_t covering = 0;             // N(A;eps) with centers in the ambient set
  double entropy = 0.0;                 // H(A;eps) = log2 N
  unsigned bits = 0;                    // minimax code length, decoder into the ambient set
  std::size_t covering_restricted = 0;  // centers restricted to A itself
  unsigned bits_restricted = 0;         // minimax code length, decoder into A
};

CodeLengthReport minimax_code_length(const FiniteMetricSpace& space, const IndexSet& subset,
                                     const IndexSet& ambient, double eps);

/// sup over the class of the distance to the nearest dictionary element.
double dictionary_minimax_error(std::span<const SampledFunctional> cls,
                                std::span<const SampledFunctional> dictionary, const FunctionNorm& norm);

/// Finite metric space whose points are the given functionals under `norm`.
FiniteMetricSpace space_of_functionals(std::span<const SampledFunctional> functionals,
                                       const FunctionNorm& norm);

}  // namespace lipent
