#pragma once

// Configuration-driven experiment runners. Every run is a pure function of
// its validated configuration and root seed; tables are byte-identical
// across reruns.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "lipent/io.hpp"
#include "lipent/metricspace.hpp"

namespace lipent {

inline constexpr const char* kConfigSchema = "lipent.experiment/v1";

/// Top-level keys: schema (must equal kConfigSchema), experiment, seed and the
/// experiment's own parameter keys. Unknown keys raise ConfigError.
struct ExperimentConfig {
  std::string experiment;  // chain-uniform | chain-expectation | sweep
  std::uint64_t seed = 0;
  nlohmann::json params;   // the full validated document
  std::string hash;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

/// {"generator": "circle", "count", "circumference"} | {"generator": "line",
/// "count", "spacing"} | {"generator": "random_plane", "count", "seed"} |
/// {"file": path} | {"points", "dist"}.
FiniteMetricSpace space_from_json(const nlohmann::json& j);

/// Columns eps, H_K_6eps, predicted, certified, centers, family_size,
/// min_pair_sup, status, pass. Rows whose family is degenerate are marked
/// skipped and do not affect the table's pass flag.
ResultTable run_uniform_chain(const ExperimentConfig& config);

/// Columns d, N, resolution, code_length, count, log2_count, log2_count_floor,
/// scale, predicted_sep, measured_min, measured_se, quadrature_min, min_margin_z,
/// pairs, pass.
ResultTable run_expectation_chain(const ExperimentConfig& config);

/// Pareto front with columns bits, minimax_err, hyper_id, grid_id, seed.
/// Metadata carries the per-cell rows, the packing count of the targets and
/// the entropy floor check.
ResultTable run_bits_accuracy(const ExperimentConfig& config);

ResultTable run_experiment(const ExperimentConfig& config);

/// Writes table.to_csv() to `path` and the metadata sidecar to path + ".meta.json".
void write_table(const ResultTable& table, const std::string& path);

}  // namespace lipent
