#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace lipent {

// Seed splitting: every consumer derives its engine seed from the root seed
// and a fixed stream id, so adding a consumer never perturbs another stream.
//
//   derive_seed(root, stream) = splitmix64(root + 0x9E3779B97F4A7C15 * (stream + 1))
//
// Nested splits (e.g. per Monte-Carlo chunk) apply derive_seed again with the
// chunk counter as the stream id.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

namespace streams {
inline constexpr std::uint64_t kSampling = 1;
inline constexpr std::uint64_t kLipschitzProbe = 2;
inline constexpr std::uint64_t kInputs = 3;
inline constexpr std::uint64_t kParams = 4;
inline constexpr std::uint64_t kDictionary = 5;
inline constexpr std::uint64_t kPairs = 6;
inline constexpr std::uint64_t kSpace = 7;
inline constexpr std::uint64_t kVerify = 8;
}  // namespace streams

/// mt19937_64 with portable real/normal transforms (the std distributions are
/// implementation-defined, which would break byte-stable outputs).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace lipent
