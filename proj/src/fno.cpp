#include "lipent/fno.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include "lipent/errors.hpp"
#include "lipent/io.hpp"
#include "lipent/rng.hpp"

namespace lipent {

namespace {

using cplx = std::complex<double>;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Per-mode data for one evaluation: the active slots, the slot of -k, and
// e^{2 pi i k.x} at every node.
struct ModeTable {
  std::vector<std::size_t> slots;
  std::vector<std::size_t> mirror;
  std::vector<std::vector<cplx>> phase;  // phase[m][node]
};

ModeTable mode_table(int d, int kappa, int n) {
  ModeTable t;
  const std::size_t total = ipow(2 * kappa, d);
  const std::size_t nodes = ipow(n, d);
  std::vector<std::vector<cplx>> axis(2 * kappa, std::vector<cplx>(n));
  for (int k = -kappa + 1; k < kappa; ++k)
    for (int i = 0; i < n; ++i) {
      // integer reduction keeps the angle exact for large k * i
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(k) * i) % n) / n;
      axis[k + kappa][i] = {std::cos(angle), std::sin(angle)};
    }
  for (std::size_t s = 0; s < total; ++s) {
    if (!slot_active(s, d, kappa)) continue;
    std::vector<int> k = slot_mode(s, d, kappa);
    std::vector<int> neg(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) neg[a] = -k[a];
    t.slots.push_back(s);
    t.mirror.push_back(mode_slot(neg, kappa));
    std::vector<cplx> ph(nodes);
    for (std::size_t x = 0; x < nodes; ++x) {
      cplx e{1.0, 0.0};
      std::size_t rest = x;
      for (int a = 0; a < d; ++a) {
        e *= axis[k[a] + kappa][rest % n];
        rest /= n;
      }
      ph[x] = e;
    }
    t.phase.push_back(std::move(ph));
  }
  return t;
}

std::uint64_t swap_bytes(std::uint64_t x) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((x >> (8 * i)) & 0xFF);
  return r;
}

cplx hermitian(double a_k, double a_minus_k, bool zero_mode) {
  if (zero_mode) return {a_k, 0.0};
  return {0.5 * (a_k + a_minus_k), 0.5 * (a_minus_k - a_k)};
}

}  // namespace

const char* to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Gelu: return "gelu";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "gelu") return Activation::Gelu;
  if (name == "identity") return Activation::Identity;
  fail(ErrorCode::InvalidArgument, "unknown activation '" + name + "'");
}

double activate(Activation a, double x) noexcept {
  switch (a) {
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Gelu: return 0.5 * x * std::erfc(-x / std::numbers::sqrt2);
    case Activation::Identity: return x;
  }
  return x;
}

double activation_lipschitz(Activation a) noexcept { return a == Activation::Gelu ? 1.129 : 1.0; }

void FnoHyper::validate() const {
  require(d >= 1 && d <= 3, ErrorCode::InvalidArgument, "FNO dimension must be 1, 2 or 3");
  require(kappa >= 1, ErrorCode::InvalidArgument, "FNO cutoff kappa must be >= 1");
  require(depth >= 1, ErrorCode::InvalidArgument, "FNO depth must be >= 1");
  require(d_in >= 1 && d_out >= 1, ErrorCode::InvalidArgument, "FNO channel counts must be >= 1");
  require(d_c >= std::max(d_in, d_out), ErrorCode::InvalidArgument, "hidden width d_c must be >= max(d_in, d_out)");
}

std::size_t FnoHyper::mode_slots() const { return ipow(2 * static_cast<std::size_t>(kappa), d); }

FnoHyper FnoHyper::from_json(const nlohmann::json& j) {
  check_keys(j, {"d", "d_in", "d_out", "d_c", "kappa", "depth", "activation", "bias"}, "hyper");
  FnoHyper h;
  h.d = j.value("d", h.d);
  h.d_in = j.value("d_in", h.d_in);
  h.d_out = j.value("d_out", h.d_out);
  h.d_c = j.value("d_c", h.d_c);
  h.kappa = j.value("kappa", h.kappa);
  h.depth = j.value("depth", h.depth);
  h.activation = activation_from_string(j.value("activation", std::string("relu")));
  const std::string bias = j.value("bias", std::string("constant"));
  require(bias == "constant" || bias == "spectral", ErrorCode::ConfigError, "bias must be 'constant' or 'spectral'");
  h.bias = bias == "constant" ? BiasMode::Constant : BiasMode::Spectral;
  h.validate();
  return h;
}

nlohmann::json FnoHyper::to_json() const {
  return {{"d", d},         {"d_in", d_in},   {"d_out", d_out},
          {"d_c", d_c},     {"kappa", kappa}, {"depth", depth},
          {"activation", to_string(activation)},
          {"bias", bias == BiasMode::Constant ? "constant" : "spectral"}};
}

ParamCount param_count(const FnoHyper& h) {
  h.validate();
  const std::uint64_t dc = h.d_c, L = h.depth, S = h.mode_slots();
  ParamCount r;
  r.q = dc * h.d_in + L * (dc * dc + S * dc * dc + dc) + dc * h.d_out;
  r.bound = 5 * S * L * dc * dc;
  r.lower_ok = r.q <= r.bound;
  r.upper_ok = r.bound <= 5 * r.q;
  return r;
}

std::size_t param_length(const FnoHyper& h) {
  const std::size_t q = param_count(h).q;
  if (h.bias == BiasMode::Constant) return q;
  return q + static_cast<std::size_t>(h.depth) * h.d_c * (h.mode_slots() - 1);
}

GridFunction::GridFunction(int dim, int resolution, int channels, std::vector<double> values)
    : dim_(dim), resolution_(resolution), channels_(channels), values_(std::move(values)) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
  require(resolution >= 1 && channels >= 1, ErrorCode::InvalidArgument, "grid resolution and channels must be >= 1");
  nodes_ = ipow(resolution, dim);
  require(values_.size() == nodes_ * channels, ErrorCode::InvalidArgument, "grid value count must be channels * n^d");
  for (double v : values_) require(std::isfinite(v), ErrorCode::InvalidArgument, "grid values must be finite");
}

GridFunction GridFunction::zeros(int dim, int resolution, int channels) {
  return GridFunction(dim, resolution, channels, std::vector<double>(ipow(resolution, dim) * channels, 0.0));
}

double GridFunction::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

GridFunction GridFunction::from_json(const nlohmann::json& j) {
  check_keys(j, {"d", "resolution", "channels", "values"}, "grid function");
  require(j.contains("resolution") && j.contains("values"), ErrorCode::ConfigError,
          "grid function needs 'resolution' and 'values'");
  return GridFunction(j.value("d", 1), j.at("resolution").get<int>(), j.value("channels", 1),
                      j.at("values").get<std::vector<double>>());
}

nlohmann::json GridFunction::to_json() const {
  return {{"d", dim_}, {"resolution", resolution_}, {"channels", channels_}, {"values", values_}};
}

GridFunction shift(const GridFunction& u, std::span<const int> offset) {
  require(static_cast<int>(offset.size()) == u.dim(), ErrorCode::InvalidArgument, "shift dimension mismatch");
  GridFunction out = GridFunction::zeros(u.dim(), u.resolution(), u.channels());
  const int n = u.resolution();
  for (std::size_t x = 0; x < u.nodes(); ++x) {
    std::size_t rest = x, src = 0, scale = 1;
    for (int a = 0; a < u.dim(); ++a) {
      const int i = static_cast<int>(rest % n);
      rest /= n;
      src += static_cast<std::size_t>(((i + offset[a]) % n + n) % n) * scale;
      scale *= n;
    }
    for (int c = 0; c < u.channels(); ++c) out.at(c, x) = u.at(c, src);
  }
  return out;
}

GridFunction pad_channels(const GridFunction& u, int channels) {
  require(channels >= u.channels(), ErrorCode::ChannelMismatch, "cannot pad to fewer channels");
  std::vector<double> values = u.values();
  values.resize(u.nodes() * channels, 0.0);
  return GridFunction(u.dim(), u.resolution(), channels, std::move(values));
}

std::size_t mode_slot(std::span<const int> k, int kappa) {
  std::size_t s = 0, scale = 1;
  for (int v : k) {
    require(v >= -kappa && v < kappa, ErrorCode::InvalidArgument, "mode component outside [-kappa, kappa)");
    s += static_cast<std::size_t>(v + kappa) * scale;
    scale *= 2 * kappa;
  }
  return s;
}

std::vector<int> slot_mode(std::size_t slot, int d, int kappa) {
  std::vector<int> k(d);
  for (int a = 0; a < d; ++a) {
    k[a] = static_cast<int>(slot % (2 * kappa)) - kappa;
    slot /= 2 * kappa;
  }
  return k;
}

bool slot_active(std::size_t slot, int d, int kappa) {
  for (int a = 0; a < d; ++a) {
    if (slot % (2 * kappa) == 0) return false;
    slot /= 2 * kappa;
  }
  return true;
}

FnoParams::FnoParams(FnoHyper hyper, std::vector<double> theta) : hyper_(hyper), theta_(std::move(theta)) {
  hyper_.validate();
  require(theta_.size() == param_length(hyper_), ErrorCode::InvalidArgument,
          "parameter vector length does not match the architecture");
  for (double v : theta_) require(std::isfinite(v), ErrorCode::InvalidArgument, "parameters must be finite");
}

FnoParams FnoParams::zeros(const FnoHyper& hyper) { return FnoParams(hyper, std::vector<double>(param_length(hyper))); }

std::size_t FnoParams::layer_size() const {
  const std::size_t dc = hyper_.d_c, S = hyper_.mode_slots();
  return dc * dc + dc * dc * S + (hyper_.bias == BiasMode::Constant ? dc : dc * S);
}

std::size_t FnoParams::layer_offset(int layer) const {
  require(layer >= 1 && layer <= hyper_.depth, ErrorCode::OutOfRange, "layer index out of range");
  return static_cast<std::size_t>(hyper_.d_out) * hyper_.d_c + (hyper_.depth - layer) * layer_size();
}

std::size_t FnoParams::q_index(int out, int c) const { return static_cast<std::size_t>(out) * hyper_.d_c + c; }

std::size_t FnoParams::p_index(int c, int in) const {
  return static_cast<std::size_t>(hyper_.d_out) * hyper_.d_c + hyper_.depth * layer_size() +
         static_cast<std::size_t>(c) * hyper_.d_in + in;
}

std::size_t FnoParams::w_index(int layer, int i, int j) const {
  return layer_offset(layer) + static_cast<std::size_t>(i) * hyper_.d_c + j;
}

std::size_t FnoParams::m_index(int layer, int i, int j, std::size_t slot) const {
  const std::size_t dc = hyper_.d_c;
  return layer_offset(layer) + dc * dc + (static_cast<std::size_t>(i) * dc + j) * hyper_.mode_slots() + slot;
}

std::size_t FnoParams::b_index(int layer, int i, std::size_t slot) const {
  const std::size_t dc = hyper_.d_c, S = hyper_.mode_slots();
  const std::size_t base = layer_offset(layer) + dc * dc + dc * dc * S;
  if (hyper_.bias == BiasMode::Constant) return base + i;
  return base + static_cast<std::size_t>(i) * S + slot;
}

std::vector<double> forward_channels(const FnoParams& params, const GridFunction& u) {
  const FnoHyper& h = params.hyper();
  require(u.dim() == h.d && u.channels() == h.d_in, ErrorCode::ChannelMismatch,
          "input must have dimension d and d_in channels");
  require(u.resolution() >= 2 * h.kappa, ErrorCode::ResolutionTooLow, "grid resolution must be >= 2 kappa");
  const std::vector<double>& th = params.theta();
  const int dc = h.d_c;
  const std::size_t nodes = u.nodes();
  const ModeTable modes = mode_table(h.d, h.kappa, u.resolution());
  const std::size_t zero_slot = mode_slot(std::vector<int>(h.d, 0), h.kappa);
  const double inv_nodes = 1.0 / static_cast<double>(nodes);

  std::vector<double> v(dc * nodes, 0.0);
  for (int c = 0; c < dc; ++c)
    for (int i = 0; i < h.d_in; ++i) {
      const double p = th[params.p_index(c, i)];
      if (p == 0.0) continue;
      for (std::size_t x = 0; x < nodes; ++x) v[c * nodes + x] += p * u.at(i, x);
    }

  std::vector<double> next(dc * nodes);
  std::vector<cplx> vhat(dc * modes.slots.size());
  for (int layer = 1; layer <= h.depth; ++layer) {
    for (int j = 0; j < dc; ++j)
      for (std::size_t m = 0; m < modes.slots.size(); ++m) {
        cplx acc{0.0, 0.0};
        const double* vj = &v[j * nodes];
        const std::vector<cplx>& ph = modes.phase[m];
        for (std::size_t x = 0; x < nodes; ++x) acc += vj[x] * std::conj(ph[x]);
        vhat[j * modes.slots.size() + m] = acc * inv_nodes;
      }
    for (int i = 0; i < dc; ++i) {
      double* out = &next[i * nodes];
      std::fill(out, out + nodes, 0.0);
      for (int j = 0; j < dc; ++j) {
        const double w = th[params.w_index(layer, i, j)];
        if (w == 0.0) continue;
        const double* vj = &v[j * nodes];
        for (std::size_t x = 0; x < nodes; ++x) out[x] += w * vj[x];
      }
      for (std::size_t m = 0; m < modes.slots.size(); ++m) {
        const std::size_t s = modes.slots[m], ms = modes.mirror[m];
        const bool zero = s == zero_slot;
        cplx coeff{0.0, 0.0};
        for (int j = 0; j < dc; ++j) {
          const cplx M = hermitian(th[params.m_index(layer, i, j, s)], th[params.m_index(layer, i, j, ms)], zero);
          coeff += M * vhat[j * modes.slots.size() + m];
        }
        if (h.bias == BiasMode::Spectral)
          coeff += hermitian(th[params.b_index(layer, i, s)], th[params.b_index(layer, i, ms)], zero);
        if (coeff == cplx{0.0, 0.0}) continue;
        const std::vector<cplx>& ph = modes.phase[m];
        for (std::size_t x = 0; x < nodes; ++x) out[x] += (coeff * ph[x]).real();
      }
      const double b = h.bias == BiasMode::Constant ? th[params.b_index(layer, i)] : 0.0;
      for (std::size_t x = 0; x < nodes; ++x) out[x] = activate(h.activation, out[x] + b);
    }
    std::swap(v, next);
  }

  std::vector<double> result(h.d_out, 0.0);
  for (int o = 0; o < h.d_out; ++o) {
    double acc = 0.0;
    for (int c = 0; c < dc; ++c) {
      const double qv = th[params.q_index(o, c)];
      if (qv == 0.0) continue;
      double mean = 0.0;
      for (std::size_t x = 0; x < nodes; ++x) mean += v[c * nodes + x];
      acc += qv * mean * inv_nodes;
    }
    result[o] = acc;
  }
  return result;
}

double forward(const FnoParams& params, const GridFunction& u) { return forward_channels(params, u)[0]; }

FnoHyper super_arch(int q, int d, int d_in, int d_out, int depth, Activation activation) {
  require(q >= 1 && depth >= 1 && depth <= q, ErrorCode::InvalidArgument, "super architecture needs 1 <= L <= q");
  FnoHyper h{d, d_in, d_out, q, q, depth, activation, BiasMode::Constant};
  h.validate();
  return h;
}

double super_arch_bound(int q, int d) { return 5.0 * std::pow(2.0, d) * std::pow(static_cast<double>(q), d + 3); }

FnoParams zero_pad_embed(const FnoParams& small, const FnoHyper& target) {
  const FnoHyper& s = small.hyper();
  target.validate();
  require(s.depth == target.depth, ErrorCode::IncompatibleDepth, "zero padding keeps the depth fixed");
  require(s.d == target.d && s.activation == target.activation && s.bias == target.bias, ErrorCode::TargetTooSmall,
          "target must share dimension, activation and bias mode");
  require(target.d_c >= s.d_c && target.kappa >= s.kappa && target.d_in >= s.d_in && target.d_out >= s.d_out,
          ErrorCode::TargetTooSmall, "target architecture is smaller than the source");
  if (s == target) return small;
  FnoParams out = FnoParams::zeros(target);
  const auto& th = small.theta();
  for (int o = 0; o < s.d_out; ++o)
    for (int c = 0; c < s.d_c; ++c) out.Q(o, c) = th[small.q_index(o, c)];
  for (int c = 0; c < s.d_c; ++c)
    for (int i = 0; i < s.d_in; ++i) out.P(c, i) = th[small.p_index(c, i)];
  const std::size_t slots = s.mode_slots();
  for (int l = 1; l <= s.depth; ++l)
    for (int i = 0; i < s.d_c; ++i) {
      for (int j = 0; j < s.d_c; ++j) {
        out.W(l, i, j) = th[small.w_index(l, i, j)];
        for (std::size_t k = 0; k < slots; ++k) {
          if (!slot_active(k, s.d, s.kappa)) continue;
          out.multiplier(l, i, j, mode_slot(slot_mode(k, s.d, s.kappa), target.kappa)) =
              th[small.m_index(l, i, j, k)];
        }
      }
      if (s.bias == BiasMode::Constant) {
        out.bias(l, i) = th[small.b_index(l, i)];
      } else {
        for (std::size_t k = 0; k < slots; ++k) {
          if (!slot_active(k, s.d, s.kappa)) continue;
          out.bias(l, i, mode_slot(slot_mode(k, s.d, s.kappa), target.kappa)) = th[small.b_index(l, i, k)];
        }
      }
    }
  return out;
}

std::vector<double> random_theta(const FnoHyper& h, double M, std::uint64_t seed) {
  Rng rng(derive_seed(seed, streams::kParams));
  std::vector<double> theta(param_length(h));
  for (double& t : theta) t = rng.uniform(-M, M);
  return theta;
}

std::vector<GridFunction> random_input_family(int d, int channels, int resolution, int modes, std::size_t count,
                                              std::uint64_t seed) {
  require(modes >= 1 && 2 * modes <= resolution, ErrorCode::ResolutionTooLow, "input modes need resolution >= 2 modes");
  Rng rng(derive_seed(seed, streams::kInputs));
  const ModeTable table = mode_table(d, modes, resolution);
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    GridFunction u = GridFunction::zeros(d, resolution, channels);
    for (int c = 0; c < channels; ++c)
      for (std::size_t m = 0; m < table.slots.size(); ++m) {
        // real part of a random complex coefficient times e^{2 pi i k.x}
        const cplx a{rng.normal(), rng.normal()};
        for (std::size_t x = 0; x < u.nodes(); ++x) u.at(c, x) += (a * table.phase[m][x]).real();
      }
    const double sup = u.sup_abs();
    if (sup > 0.0) {
      std::vector<double> values = u.values();
      for (double& v : values) v /= sup;
      u = GridFunction(d, resolution, channels, std::move(values));
    }
    out.push_back(std::move(u));
  }
  return out;
}

double empirical_lipschitz(const FnoHyper& h, double M, std::size_t probes, const std::vector<GridFunction>& inputs,
                           std::uint64_t seed) {
  require(probes >= 100, ErrorCode::InvalidArgument, "empirical Lipschitz estimate needs >= 100 probes");
  require(M > 0.0, ErrorCode::InvalidArgument, "parameter box half-width must be positive");
  require(!inputs.empty(), ErrorCode::InvalidArgument, "empirical Lipschitz estimate needs inputs");
  Rng rng(derive_seed(seed, streams::kLipschitzProbe));
  const std::size_t q = param_length(h);
  auto draw = [&] {
    std::vector<double> t(q);
    for (double& x : t) x = rng.uniform(-M, M);
    return t;
  };
  auto ratio = [&](const FnoParams& a, const FnoParams& b, const GridFunction& u) {
    double dist = 0.0;
    for (std::size_t i = 0; i < q; ++i) dist = std::max(dist, std::abs(a.theta()[i] - b.theta()[i]));
    if (dist == 0.0) return 0.0;
    return std::abs(forward(a, u) - forward(b, u)) / dist;
  };
  double best = 0.0;
  const double fd = 1e-6 * M, step = 1e-4 * M;
  for (std::size_t p = 0; p < probes; ++p) {
    const FnoParams a(h, draw());
    if (p % 2 == 0) {
      const FnoParams b(h, draw());
      for (const GridFunction& u : inputs) best = std::max(best, ratio(a, b, u));
      continue;
    }
    const GridFunction& u = inputs[rng.below(inputs.size())];
    FnoParams b = a;
    for (std::size_t i = 0; i < q; ++i) {
      double sign;
      if (q <= 256) {
        FnoParams plus = a, minus = a;
        plus.theta()[i] += fd;
        minus.theta()[i] -= fd;
        sign = forward(plus, u) >= forward(minus, u) ? 1.0 : -1.0;
      } else {
        sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      }
      double& t = b.theta()[i];
      t = std::clamp(t + sign * step, -M, M);
      if (t == a.theta()[i]) t = std::clamp(t - sign * step, -M, M);
    }
    best = std::max(best, ratio(a, b, u));
  }
  return best;
}

void write_params(const std::string& path, std::span<const double> theta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot open '" + path + "' for writing");
  for (double v : theta) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = swap_bytes(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing '" + path + "'");
}

std::vector<double> read_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open '" + path + "'");
  std::vector<double> out;
  char buf[8];
  while (in.read(buf, 8)) {
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = swap_bytes(bits);
    out.push_back(std::bit_cast<double>(bits));
  }
  require(in.gcount() == 0, ErrorCode::IoError, "'" + path + "' is not a whole number of float64 values");
  return out;
}

}  // namespace lipent
