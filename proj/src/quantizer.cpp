#include "lipent/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lipent/errors.hpp"
#include "lipent/metricspace.hpp"
#include "lipent/rng.hpp"

namespace lipent {

QuantGrid QuantGrid::make(double M, double delta) {
  require(M > 0.0 && std::isfinite(M), ErrorCode::InvalidArgument, "grid range M must be positive");
  require(delta > 0.0 && delta <= 2.0 * M, ErrorCode::InvalidArgument, "grid spacing must lie in (0, 2M]");
  const double steps = 2.0 * M / delta;
  const double rounded = std::round(steps);
  require(std::abs(steps - rounded) <= 1e-9 * rounded, ErrorCode::InvalidArgument,
          "2M / delta must be an integer so that both endpoints lie on the grid");
  require(rounded < 0x1.0p52, ErrorCode::SizeLimitExceeded, "grid has too many points");
  QuantGrid g;
  g.M = M;
  g.delta = delta;
  g.points = static_cast<std::uint64_t>(rounded) + 1;
  g.bits = bits_for(g.points);
  return g;
}

std::uint64_t QuantGrid::index_of(double x) const {
  require(std::isfinite(x) && std::abs(x) <= M * (1.0 + 1e-12), ErrorCode::OutOfRange,
          "parameter outside [-M, M]");
  const double t = (x + M) / delta;
  const double fl = std::floor(t);
  const double frac = t - fl;
  double idx;
  if (std::abs(frac - 0.5) <= 1e-9)
    idx = std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
  else
    idx = frac < 0.5 ? fl : fl + 1.0;
  return static_cast<std::uint64_t>(std::clamp(idx, 0.0, static_cast<double>(points - 1)));
}

nlohmann::json QuantGrid::to_json() const {
  return {{"M", M}, {"delta", delta}, {"points", points}, {"bits", bits}};
}

std::vector<double> quantize(std::span<const double> theta, const QuantGrid& grid) {
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = grid.point(grid.index_of(theta[i]));
  return out;
}

LipBoundInputs lip_bound_inputs(const FnoHyper& h, double M, double C) {
  return LipBoundInputs{h.depth, h.d_c, h.kappa, h.d, M, C};
}

double theoretical_lip_bound_log2(const LipBoundInputs& in) {
  require(in.L >= 1 && in.d_c >= 1 && in.kappa >= 1 && in.d >= 1 && in.M > 0.0 && in.C >= 0.0,
          ErrorCode::InvalidArgument, "Lipschitz bound inputs must be positive");
  return std::log2(in.L + 2.0) + (in.L + 2.0) * std::log2(2.0 * in.d_c * in.M) +
         std::log2(in.C + std::pow(2.0 * in.kappa, in.d / 2.0));
}

double theoretical_lip_bound(const LipBoundInputs& in) { return std::exp2(theoretical_lip_bound_log2(in)); }

double calibrate_lip_constant(const FnoHyper& reference, double M, double empirical) {
  require(empirical >= 0.0, ErrorCode::InvalidArgument, "empirical Lipschitz estimate must be nonnegative");
  const LipBoundInputs in = lip_bound_inputs(reference, M, 0.0);
  const double prefactor = (in.L + 2.0) * std::pow(2.0 * in.d_c * in.M, in.L + 2.0);
  const double matching = empirical / prefactor - std::pow(2.0 * in.kappa, in.d / 2.0);
  return 2.0 * std::max(0.0, matching);
}

nlohmann::json BitBudget::to_json() const {
  return {{"q", q},
          {"d", d},
          {"m", m},
          {"gamma", gamma},
          {"C", C},
          {"depth_bits", depth_bits},
          {"log2_points", log2_points},
          {"b1", b1},
          {"q_hat", q_hat},
          {"coord_bits", coord_bits},
          {"ell_q", ell_q},
          {"total", total},
          {"raw_total", raw_total},
          {"log2_total", log2_total},
          {"log2_raw_total", log2_raw_total},
          {"scaled", scaled},
          {"raw_scaled", raw_scaled}};
}

BitBudget bit_budget_asymptotic(std::uint64_t q, int d, double gamma, double C) {
  require(q >= 2, ErrorCode::InvalidArgument, "asymptotic budget needs q >= 2");
  require(gamma > 0.0 && C > 0.0, ErrorCode::InvalidArgument, "gamma and C must be positive");
  require(d >= 1 && d <= 3, ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  const double qd = static_cast<double>(q);
  BitBudget b;
  b.q = q;
  b.d = d;
  b.m = d + 6;
  b.gamma = gamma;
  b.C = C;
  b.depth_bits = bits_for(q);
  // log2(2 M_q / delta_q) = 1 + q log2 e + gamma log2 log q + C q log(C q) log2 e
  b.log2_points = 1.0 + qd * std::numbers::log2e + gamma * std::log2(std::log(qd)) +
                  C * qd * std::log(C * qd) * std::numbers::log2e;
  b.b1 = static_cast<std::uint64_t>(std::ceil(b.log2_points));
  // the count is increasing in L, so L = q attains the maximum
  b.q_hat = param_count(super_arch(static_cast<int>(q), d, 1, 1, static_cast<int>(q))).q;
  b.coord_bits = static_cast<double>(b.q_hat) * static_cast<double>(b.b1);
  b.ell_q = std::max(std::ceil(std::pow(qd, b.m)), b.coord_bits);
  b.total = b.depth_bits + b.ell_q;
  b.raw_total = b.depth_bits + b.coord_bits;
  b.log2_total = std::log2(b.total);
  b.log2_raw_total = std::log2(b.raw_total);
  b.scaled = b.log2_total - b.m * std::log2(qd);
  b.raw_scaled = b.log2_raw_total - b.m * std::log2(qd);
  return b;
}

nlohmann::json BudgetSweep::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) rows_json.push_back(r.to_json());
  return {{"rows", rows_json}, {"lo", lo}, {"hi", hi}, {"raw_lo", raw_lo}, {"raw_hi", raw_hi}};
}

BudgetSweep bit_budget_sweep(std::uint64_t q_lo, std::uint64_t q_hi, int d, double gamma, double C) {
  require(q_lo >= 2 && q_lo <= q_hi, ErrorCode::InvalidArgument, "budget sweep needs 2 <= q_lo <= q_hi");
  BudgetSweep s;
  s.lo = s.raw_lo = INFINITY;
  s.hi = s.raw_hi = -INFINITY;
  for (std::uint64_t q = q_lo; q <= q_hi; ++q) {
    const BitBudget b = bit_budget_asymptotic(q, d, gamma, C);
    s.lo = std::min(s.lo, b.scaled);
    s.hi = std::max(s.hi, b.scaled);
    s.raw_lo = std::min(s.raw_lo, b.raw_scaled);
    s.raw_hi = std::max(s.raw_hi, b.raw_scaled);
    s.rows.push_back(b);
  }
  return s;
}

DeskBudget bit_budget_desk(const FnoHyper& h, const QuantGrid& grid) {
  DeskBudget b;
  b.q = param_length(h);
  b.depth_bits = bits_for(b.q);
  b.b1 = grid.bits;
  b.coord_bits = b.q * b.b1;
  b.total = b.depth_bits + b.coord_bits;
  return b;
}

nlohmann::json CertificationReport::to_json() const {
  return {{"measured_err", measured_err}, {"rounding_err", rounding_err}, {"lip_estimate", lip_estimate},
          {"bound", bound},               {"inputs", inputs},             {"pass", pass}};
}

CertificationReport certify_quantization(const FnoParams& params, const QuantGrid& grid,
                                         const std::vector<GridFunction>& inputs, double lip_estimate) {
  const FnoParams rounded(params.hyper(), quantize(params.theta(), grid));
  CertificationReport r;
  for (std::size_t i = 0; i < params.theta().size(); ++i)
    r.rounding_err = std::max(r.rounding_err, std::abs(params.theta()[i] - rounded.theta()[i]));
  for (const GridFunction& u : inputs)
    r.measured_err = std::max(r.measured_err, std::abs(forward(params, u) - forward(rounded, u)));
  r.lip_estimate = lip_estimate;
  r.bound = lip_estimate * grid.delta / 2.0;
  r.inputs = inputs.size();
  r.pass = r.measured_err <= r.bound;
  return r;
}

std::vector<SweepRow> pareto_front(std::vector<SweepRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.bits != b.bits ? a.bits < b.bits : a.minimax_err < b.minimax_err;
  });
  std::vector<SweepRow> front;
  for (const auto& r : rows)
    if (front.empty() || r.minimax_err < front.back().minimax_err) front.push_back(r);
  return front;
}

SweepResult accuracy_bits_sweep(const std::vector<SampledFunctional>& targets, const std::vector<SweepCell>& cells,
                                const std::vector<GridFunction>& inputs, const std::string& sample_set,
                                const SweepOptions& options) {
  require(!targets.empty() && !cells.empty() && !inputs.empty(), ErrorCode::InvalidArgument,
          "sweep needs targets, cells and inputs");
  for (const auto& t : targets)
    require(t.sample_set == sample_set && t.values.size() == inputs.size(), ErrorCode::SampleMismatch,
            "targets must be sampled on the sweep inputs");
  SweepResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const SweepCell& cell = cells[c];
    const std::size_t q = param_length(cell.hyper);
    const std::uint64_t base = cell.grid.points;
    // |Theta| = points^q, saturated once it passes the exhaustive limit
    std::uint64_t size = 1;
    bool exhaustive = true;
    for (std::size_t i = 0; i < q && exhaustive; ++i) {
      if (size > options.exhaustive_limit / base) exhaustive = false;
      size *= base;
    }
    exhaustive = exhaustive && size <= options.exhaustive_limit;
    const std::uint64_t members = exhaustive ? size : options.random_dictionary;
    require(members <= options.evaluation_cap / inputs.size(), ErrorCode::BudgetExceeded,
            "dictionary for cell " + cell.hyper_id + "/" + cell.grid_id + " exceeds the evaluation cap");

    Rng rng(derive_seed(derive_seed(options.seed, streams::kDictionary), c));
    std::vector<SampledFunctional> dictionary;
    dictionary.reserve(members);
    std::vector<double> theta(q);
    for (std::uint64_t m = 0; m < members; ++m) {
      std::uint64_t rest = m;
      for (std::size_t i = 0; i < q; ++i) {
        std::uint64_t idx;
        if (exhaustive) {
          idx = rest % base;
          rest /= base;
        } else {
          idx = rng.below(base);
        }
        theta[i] = cell.grid.point(idx);
      }
      const FnoParams params(cell.hyper, theta);
      SampledFunctional f{sample_set, std::vector<double>(inputs.size())};
      for (std::size_t i = 0; i < inputs.size(); ++i) f.values[i] = forward(params, inputs[i]);
      dictionary.push_back(std::move(f));
    }
    SweepRow row;
    row.bits = bit_budget_desk(cell.hyper, cell.grid).total;
    row.minimax_err = dictionary_minimax_error(targets, dictionary, FunctionNorm::sup());
    row.hyper_id = cell.hyper_id;
    row.grid_id = cell.grid_id;
    row.seed = options.seed;
    row.exhaustive = exhaustive;
    result.cells.push_back(row);
  }
  result.front = pareto_front(result.cells);
  return result;
}

}  // namespace lipent
