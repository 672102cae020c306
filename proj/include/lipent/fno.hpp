#pragma once

// Output-averaged Fourier neural operators on the periodic grid of [0,1)^d:
// parameter layout and counting, forward evaluation, zero-padding into a
// larger architecture and empirical Lipschitz estimates in parameter space.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace lipent {

enum class Activation { Relu, Gelu, Identity };

const char* to_string(Activation a) noexcept;
Activation activation_from_string(const std::string& name);
double activate(Activation a, double x) noexcept;
/// 1 for relu and identity, 1.129 for gelu (sup of the derivative, rounded up).
double activation_lipschitz(Activation a) noexcept;

/// Constant: one bias vector per layer. Spectral: a bias coefficient per
/// channel and Fourier mode, applied through the same Hermitian rule as the
/// multiplier.
enum class BiasMode { Constant, Spectral };

struct FnoHyper {
  int d = 1;
  int d_in = 1;
  int d_out = 1;
  int d_c = 1;
  int kappa = 1;
  int depth = 1;
  Activation activation = Activation::Relu;
  BiasMode bias = BiasMode::Constant;

  /// Throws InvalidArgument unless 1 <= d <= 3, kappa, depth >= 1 and
  /// d_c >= max(d_in, d_out) >= 1.
  void validate() const;
  /// (2 kappa)^d mode slots per channel pair.
  std::size_t mode_slots() const;

  static FnoHyper from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  bool operator==(const FnoHyper&) const = default;
};

struct ParamCount {
  std::uint64_t q = 0;      // d_c d_in + L (d_c^2 + (2k)^d d_c^2 + d_c) + d_c d_out
  std::uint64_t bound = 0;  // 5 (2k)^d L d_c^2
  bool lower_ok = false;    // q <= bound
  bool upper_ok = false;    // bound <= 5 q
};

ParamCount param_count(const FnoHyper& h);
/// Length of the parameter vector: equals param_count(h).q for constant bias,
/// and grows by L d_c ((2k)^d - 1) in spectral-bias mode.
std::size_t param_length(const FnoHyper& h);

/// Real values on the n^d nodes j/n of the torus, one block of n^d values per
/// channel. Node (i_1,...,i_d) is stored at i_1 + n i_2 + n^2 i_3.
class GridFunction {
 public:
  GridFunction(int dim, int resolution, int channels, std::vector<double> values);
  static GridFunction zeros(int dim, int resolution, int channels);

  int dim() const noexcept { return dim_; }
  int resolution() const noexcept { return resolution_; }
  int channels() const noexcept { return channels_; }
  std::size_t nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double& at(int channel, std::size_t node) { return values_[channel * nodes_ + node]; }
  double at(int channel, std::size_t node) const { return values_[channel * nodes_ + node]; }
  double sup_abs() const;

  static GridFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  int dim_;
  int resolution_;
  int channels_;
  std::size_t nodes_;
  std::vector<double> values_;
};

/// Periodic shift u(x) -> u(x + offset / n).
GridFunction shift(const GridFunction& u, std::span<const int> offset);
/// Appends zero channels up to `channels`.
GridFunction pad_channels(const GridFunction& u, int channels);

/// Parameter vector and typed views into it. Layout, in order:
///   Q (d_out x d_c), layers L, L-1, ..., 1, then P (d_c x d_in),
/// where each layer is W (d_c x d_c), the multiplier table (d_c x d_c x
/// (2k)^d real slots) and the bias (d_c, or d_c x (2k)^d in spectral mode).
/// Slot s = sum_a (k_a + kappa) (2 kappa)^a addresses mode k in
/// {-kappa..kappa-1}^d; slots with some k_a = -kappa are never read.
/// The applied multiplier at an active mode k != 0 is
///   M_k = ((a_k + a_{-k}) + i (a_{-k} - a_k)) / 2,  M_0 = a_0,
/// which is Hermitian (M_{-k} = conj M_k) so the layer maps real to real.
class FnoParams {
 public:
  FnoParams(FnoHyper hyper, std::vector<double> theta);
  static FnoParams zeros(const FnoHyper& hyper);

  const FnoHyper& hyper() const noexcept { return hyper_; }
  const std::vector<double>& theta() const noexcept { return theta_; }
  std::vector<double>& theta() noexcept { return theta_; }

  double& Q(int out, int c) { return theta_[q_index(out, c)]; }
  double& P(int c, int in) { return theta_[p_index(c, in)]; }
  double& W(int layer, int i, int j) { return theta_[w_index(layer, i, j)]; }
  double& multiplier(int layer, int i, int j, std::size_t slot) { return theta_[m_index(layer, i, j, slot)]; }
  /// slot is ignored (must be 0) in constant-bias mode.
  double& bias(int layer, int i, std::size_t slot = 0) { return theta_[b_index(layer, i, slot)]; }

  std::size_t q_index(int out, int c) const;
  std::size_t p_index(int c, int in) const;
  std::size_t w_index(int layer, int i, int j) const;
  std::size_t m_index(int layer, int i, int j, std::size_t slot) const;
  std::size_t b_index(int layer, int i, std::size_t slot = 0) const;

 private:
  std::size_t layer_offset(int layer) const;
  std::size_t layer_size() const;

  FnoHyper hyper_;
  std::vector<double> theta_;
};

/// Slot of mode k (components in [-kappa, kappa)).
std::size_t mode_slot(std::span<const int> k, int kappa);
/// Mode of slot s.
std::vector<int> slot_mode(std::size_t slot, int d, int kappa);
/// True iff every component of the slot's mode lies in (-kappa, kappa).
bool slot_active(std::size_t slot, int d, int kappa);

/// Spatial mean of output channel 0. Throws ChannelMismatch unless u has d_in
/// channels and dimension d, ResolutionTooLow unless n >= 2 kappa.
double forward(const FnoParams& params, const GridFunction& u);
/// Spatial means of all d_out output channels.
std::vector<double> forward_channels(const FnoParams& params, const GridFunction& u);

/// d_c = kappa = q with the given depth; the parameter count is at most
/// 5 2^d q^{d+3}.
FnoHyper super_arch(int q, int d, int d_in, int d_out, int depth, Activation activation = Activation::Relu);
/// Upper bound 5 2^d q^{d+3} on the super-architecture count.
double super_arch_bound(int q, int d);

/// Copies `small` into the larger architecture `target`; all new entries are
/// zero. Throws IncompatibleDepth when depths differ and TargetTooSmall when
/// target is smaller in d_c, kappa, d_in or d_out or differs in d, activation
/// or bias mode. Inputs with fewer channels are evaluated after pad_channels.
FnoParams zero_pad_embed(const FnoParams& small, const FnoHyper& target);

/// Uniform draw in [-M, M]^length.
std::vector<double> random_theta(const FnoHyper& h, double M, std::uint64_t seed);

/// `count` real inputs with modes |k|_inf < modes and sup over the nodes
/// exactly 1 (0 for the zero function).
std::vector<GridFunction> random_input_family(int d, int channels, int resolution, int modes, std::size_t count,
                                              std::uint64_t seed);

/// Max over probe pairs (theta, theta') in [-M, M]^q and inputs of
/// |Phi(u; theta) - Phi(u; theta')| / |theta - theta'|_inf. Half the probes
/// use independent pairs; the other half step from a random theta along the
/// sign of a finite-difference gradient.
double empirical_lipschitz(const FnoHyper& h, double M, std::size_t probes, const std::vector<GridFunction>& inputs,
                           std::uint64_t seed);

/// Flat little-endian float64 serialization of theta.
void write_params(const std::string& path, std::span<const double> theta);
std::vector<double> read_params(const std::string& path);

}  // namespace lipent
