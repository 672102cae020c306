#pragma once

// Uniform parameter grids on [-M, M]^q, nearest-point rounding, bit budgets,
// the parameter-space Lipschitz bound and quantization certificates.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipent/fno.hpp"
#include "lipent/sampled.hpp"

namespace lipent {

/// Points -M, -M + delta, ..., M. 2M/delta must be an integer (relative
/// tolerance 1e-9) so that both endpoints are grid points.
struct QuantGrid {
  double M = 1.0;
  double delta = 1.0;
  std::uint64_t points = 0;  // floor(2M/delta) + 1
  unsigned bits = 0;         // ceil(log2 points)

  static QuantGrid make(double M, double delta);
  double point(std::uint64_t index) const noexcept { return -M + static_cast<double>(index) * delta; }
  /// Nearest grid index, ties (within 1e-9 of a half step) to the even index.
  /// Throws OutOfRange when |x| > M.
  std::uint64_t index_of(double x) const;
  nlohmann::json to_json() const;
};

std::vector<double> quantize(std::span<const double> theta, const QuantGrid& grid);

struct LipBoundInputs {
  int L = 1;
  int d_c = 1;
  int kappa = 1;
  int d = 1;
  double M = 1.0;
  double C = 0.0;
};

LipBoundInputs lip_bound_inputs(const FnoHyper& h, double M, double C);
/// log2 of (L+2) (2 d_c M)^{L+2} (C + (2 kappa)^{d/2}).
double theoretical_lip_bound_log2(const LipBoundInputs& in);
double theoretical_lip_bound(const LipBoundInputs& in);

/// C = 2 max(0, c*) where c* is the constant at which the bound equals the
/// empirical estimate on the given architecture and box.
double calibrate_lip_constant(const FnoHyper& reference, double M, double empirical);

/// Bit counts for the super-architecture encoding at scale q, with
/// M_q = e^q and delta_q = log(q)^{-gamma} / exp(C q log(C q)). Everything is
/// evaluated in log2-space; no grid is materialized.
struct BitBudget {
  std::uint64_t q = 0;
  int d = 1;
  int m = 7;                       // d + 6
  double gamma = 1.0;
  double C = 1.0;
  unsigned depth_bits = 0;         // ceil(log2 q)
  double log2_points = 0.0;        // log2(2 M_q / delta_q)
  std::uint64_t b1 = 0;            // ceil(log2_points)
  std::uint64_t q_hat = 0;         // largest super-architecture count over L <= q
  double coord_bits = 0.0;         // q_hat * b1
  double ell_q = 0.0;              // max(ceil(q^m), coord_bits)
  double total = 0.0;              // depth_bits + ell_q
  double raw_total = 0.0;          // depth_bits + coord_bits
  double log2_total = 0.0;
  double log2_raw_total = 0.0;
  double scaled = 0.0;             // log2_total - m log2 q
  double raw_scaled = 0.0;         // log2_raw_total - m log2 q
  nlohmann::json to_json() const;
};

BitBudget bit_budget_asymptotic(std::uint64_t q, int d, double gamma, double C);

struct BudgetSweep {
  std::vector<BitBudget> rows;
  double lo = 0.0, hi = 0.0;          // range of BitBudget::scaled
  double raw_lo = 0.0, raw_hi = 0.0;  // range of BitBudget::raw_scaled
  bool within(double window) const noexcept { return lo >= -window && hi <= window; }
  bool raw_within(double window) const noexcept { return raw_lo >= -window && raw_hi <= window; }
  nlohmann::json to_json() const;
};

BudgetSweep bit_budget_sweep(std::uint64_t q_lo, std::uint64_t q_hi, int d, double gamma, double C);

/// Fixed architecture on a desk-scale grid: ceil(log2 q) + q b1 bits.
struct DeskBudget {
  std::uint64_t q = 0;
  unsigned depth_bits = 0;
  unsigned b1 = 0;
  std::uint64_t coord_bits = 0;
  std::uint64_t total = 0;
};

DeskBudget bit_budget_desk(const FnoHyper& h, const QuantGrid& grid);

struct CertificationReport {
  double measured_err = 0.0;   // max over inputs of |Phi(u; theta) - Phi(u; quantize(theta))|
  double rounding_err = 0.0;   // |theta - quantize(theta)|_inf
  double lip_estimate = 0.0;
  double bound = 0.0;          // lip_estimate * delta / 2
  std::size_t inputs = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

CertificationReport certify_quantization(const FnoParams& params, const QuantGrid& grid,
                                         const std::vector<GridFunction>& inputs, double lip_estimate);

struct SweepCell {
  std::string hyper_id;
  FnoHyper hyper;
  std::string grid_id;
  QuantGrid grid;
};

struct SweepOptions {
  std::uint64_t seed = 0;
  std::uint64_t exhaustive_limit = std::uint64_t{1} << 14;  // dictionary sizes enumerated in full
  std::uint64_t random_dictionary = 4096;                   // members drawn otherwise
  std::uint64_t evaluation_cap = std::uint64_t{1} << 20;    // forward evaluations per cell
};

struct SweepRow {
  std::uint64_t bits = 0;
  double minimax_err = 0.0;
  std::string hyper_id;
  std::string grid_id;
  std::uint64_t seed = 0;
  bool exhaustive = true;  // false: random search, the error is an upper bound
};

struct SweepResult {
  std::vector<SweepRow> cells;  // one row per (hyper, grid), in ladder order
  std::vector<SweepRow> front;  // Pareto front sorted by bits
};

/// For every cell, builds the dictionary of quantized networks evaluated on
/// `inputs` (labelled `sample_set`) and reports the sup-norm minimax error of
/// the targets against it. Throws BudgetExceeded when a cell would need more
/// than evaluation_cap forward evaluations.
SweepResult accuracy_bits_sweep(const std::vector<SampledFunctional>& targets, const std::vector<SweepCell>& cells,
                                const std::vector<GridFunction>& inputs, const std::string& sample_set,
                                const SweepOptions& options);

/// Rows sorted by bits, keeping a row only when its error is strictly below
/// every row with fewer or equal bits.
std::vector<SweepRow> pareto_front(std::vector<SweepRow> rows);

}  // namespace lipent
