#include "lipent/cli.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lipent/errors.hpp"
#include "lipent/experiments.hpp"
#include "lipent/fno.hpp"
#include "lipent/grid.hpp"
#include "lipent/io.hpp"
#include "lipent/metricspace.hpp"
#include "lipent/packing.hpp"
#include "lipent/quantizer.hpp"
#include "lipent/randomfield.hpp"

namespace lipent {

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::uint64_t seed_or(std::uint64_t fallback) const { return seed ? *seed : fallback; }
};

nlohmann::json load_config_or_empty(const Globals& g) {
  return g.config.empty() ? nlohmann::json::object() : read_json_file(g.config);
}

// A JSON result: printed, optionally written to --out, and its pass flag
// turned into the exit code.
int emit_json(const Globals& g, nlohmann::json result, bool pass, std::ostream& out) {
  result["pass"] = pass;
  const std::string text = result.dump(2) + "\n";
  if (!g.out.empty()) write_atomic(g.out, text);
  out << text;
  return pass ? 0 : 1;
}

int emit_table(const Globals& g, const ResultTable& table, std::ostream& out) {
  if (g.out.empty())
    out << table.to_csv();
  else
    write_table(table, g.out);
  return table.pass ? 0 : 1;
}

FiniteMetricSpace space_option(const std::string& path, const nlohmann::json& config) {
  if (!path.empty()) return FiniteMetricSpace::from_json(read_json_file(path));
  require(config.contains("space"), ErrorCode::ConfigError, "no --space file and no 'space' block in --config");
  return space_from_json(config.at("space"));
}

double eps_option(const std::optional<double>& eps, const nlohmann::json& config) {
  if (eps) return *eps;
  require(config.contains("eps") && config.at("eps").is_number(), ErrorCode::ConfigError,
          "no --eps and no numeric 'eps' in --config");
  return config.at("eps").get<double>();
}

nlohmann::json code_length_json(const CodeLengthReport& r) {
  return {{"covering", r.covering},
          {"entropy", r.entropy},
          {"bits", r.bits},
          {"covering_restricted", r.covering_restricted},
          {"bits_restricted", r.bits_restricted}};
}

UnitGridFunction isometry_function(const std::string& kind, int d) {
  if (kind == "constant") return UnitGridFunction::sample(d, 8, [](std::span<const double>) { return 1.0; });
  if (kind == "x1") return UnitGridFunction::sample(d, 8, [](std::span<const double> x) { return x[0]; });
  require(kind == "bump", ErrorCode::InvalidArgument, "function must be constant, x1 or bump");
  const int N = 2;
  const int length = d == 1 ? N : (d == 2 ? N * N : N * N * N);
  const BumpFamily family = build_bump_family(d, N, 2 * N * (d + 1) * 2, gilbert_varshamov(length));
  return family.grid_member(0);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metric entropy, packing certificates and quantized neural operators"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Root seed (overrides the config seed)");
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output file (written atomically)");

  std::string space_path;
  std::optional<double> eps;
  std::vector<std::size_t> subset;
  auto* codelength = app.add_subcommand("codelength", "Covering number, entropy and minimax code length");
  codelength->add_option("--space", space_path, "Finite metric space JSON {points, dist}");
  codelength->add_option("--eps", eps, "Radius");
  codelength->add_option("--subset", subset, "Point indices of A (default: the whole space)");

  auto* hat = app.add_subcommand("hat", "Hat-function packing of Lip_1(K) in the sup norm");
  hat->add_option("--space", space_path, "Finite metric space JSON {points, dist}");
  hat->add_option("--eps", eps, "Scale eps in (0, 1/3]");

  int gv_n = 8;
  auto* gv = app.add_subcommand("gv", "Greedy Gilbert-Varshamov sign code");
  gv->add_option("--n", gv_n, "Code length (1..40)")->required();

  int bump_d = 1, bump_N = 2, bump_grid = 0;
  auto* bump = app.add_subcommand("bump", "Plateau-bump family on [0,1]^d");
  bump->add_option("--d", bump_d, "Dimension (1..3)");
  bump->add_option("--N", bump_N, "Subdivisions per axis");
  bump->add_option("--grid", bump_grid, "Grid resolution (default 4N(d+1))");

  std::string embed_f = "x1", embed_law = "gaussian";
  int embed_d = 1;
  double embed_alpha = 1.0, embed_p = 1.0;
  std::size_t embed_J = 16, embed_samples = 100000;
  auto* embed_check = app.add_subcommand("embed-check", "Monte-Carlo check of the L^p isometry f -> f o h_d");
  embed_check->add_option("--f", embed_f, "constant | x1 | bump");
  embed_check->add_option("--d", embed_d, "Dimension (1..3)");
  embed_check->add_option("--alpha", embed_alpha, "Eigenvalue decay lambda_j = j^{-2 alpha}");
  embed_check->add_option("--J", embed_J, "KL truncation");
  embed_check->add_option("--law", embed_law, "gaussian | uniform");
  embed_check->add_option("--p", embed_p, "Exponent p >= 1");
  embed_check->add_option("--samples", embed_samples, "Monte-Carlo samples");

  std::string hyper_path, params_path, input_path;
  auto* fno = app.add_subcommand("fno", "Evaluate an output-averaged FNO");
  fno->add_option("--hyper", hyper_path, "Architecture JSON")->required();
  fno->add_option("--params", params_path, "Little-endian float64 parameter file")->required();
  fno->add_option("--input", input_path, "Input grid function JSON")->required();

  double q_delta = 0.01, q_M = 1.0;
  std::size_t q_inputs = 64, q_probes = 400;
  auto* quantize_cmd = app.add_subcommand("quantize", "Quantization certificate for a random parameter vector");
  quantize_cmd->add_option("--hyper", hyper_path, "Architecture JSON")->required();
  quantize_cmd->add_option("--delta", q_delta, "Grid spacing (2M/delta integral)");
  quantize_cmd->add_option("--M", q_M, "Parameter box half-width");
  quantize_cmd->add_option("--inputs", q_inputs, "Number of test inputs");
  quantize_cmd->add_option("--probes", q_probes, "Probe pairs for the empirical Lipschitz constant");

  auto* sweep = app.add_subcommand("sweep", "Bits-versus-accuracy sweep (CSV)");
  auto* chain_uniform = app.add_subcommand("chain-uniform", "Uniform-setting entropy chain (CSV)");
  auto* chain_expectation = app.add_subcommand("chain-expectation", "Expectation-setting packing chain (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (codelength->parsed()) {
      const nlohmann::json config = load_config_or_empty(g);
      const FiniteMetricSpace space = space_option(space_path, config);
      const double e = eps_option(eps, config);
      IndexSet a = subset.empty() ? space.all() : IndexSet(subset.begin(), subset.end());
      for (std::size_t i : a) require(i < space.size(), ErrorCode::InvalidArgument, "subset index out of range");
      const CodeLengthReport r = minimax_code_length(space, a, space.all(), e);
      const SandwichReport s = sandwich_check(space, a, space.all(), e);
      nlohmann::json result = code_length_json(r);
      result["eps"] = e;
      result["sandwich"] = {{"packing_3eps", s.packing_3eps}, {"covering", s.covering}, {"packing", s.packing},
                            {"holds", s.holds}};
      return emit_json(g, result, s.holds && r.bits == bits_for(r.covering), out);
    }
    if (hat->parsed()) {
      const nlohmann::json config = load_config_or_empty(g);
      const FiniteMetricSpace space = space_option(space_path, config);
      const double e = eps_option(eps, config);
      const HatFamily family = build_hat_family(space, e);
      const HatVerification v = verify_hat_family(family, space, g.seed_or(0));
      nlohmann::json result = family.manifest();
      result["verification"] = {{"min_pair_distance", v.min_pair_distance}, {"max_sup", v.max_sup},
                                {"max_lipschitz", v.max_lipschitz},         {"pairs_checked", v.pairs_checked},
                                {"exhaustive", v.exhaustive}};
      return emit_json(g, result, v.ok, out);
    }
    if (gv->parsed()) {
      const SignCode code = gilbert_varshamov(gv_n);
      nlohmann::json result = code.manifest();
      const int dmin = code.min_distance();
      result["min_distance"] = dmin;
      return emit_json(g, result, code.words.size() >= code.target_size && dmin >= code.required_distance, out);
    }
    if (bump->parsed()) {
      const int grid = bump_grid > 0 ? bump_grid : 4 * bump_N * (bump_d + 1);
      int length = 1;
      for (int a = 0; a < bump_d; ++a) length *= bump_N;
      const BumpFamily family = build_bump_family(bump_d, bump_N, grid, gilbert_varshamov(length));
      const BumpVerification v = verify_bump_family(family);
      nlohmann::json result = family.manifest();
      result["verification"] = {{"min_pair_l1", v.min_pair_l1},
                                {"separation_bound", v.separation_bound},
                                {"measured_constant", v.measured_constant},
                                {"max_sup", v.max_sup},
                                {"max_lipschitz", v.max_lipschitz},
                                {"bump_l1", v.bump_l1},
                                {"bump_l1_closed_form", bump_l1_closed_form(bump_d, family.lambda())},
                                {"bump_l1_lower", v.bump_l1_lower}};
      return emit_json(g, result, v.ok, out);
    }
    if (embed_check->parsed()) {
      const CoordinateLaw law = embed_law == "uniform" ? CoordinateLaw::Uniform : CoordinateLaw::Gaussian;
      require(embed_law == "uniform" || embed_law == "gaussian", ErrorCode::InvalidArgument,
              "law must be gaussian or uniform");
      const KLMeasure measure = KLMeasure::power_law(embed_alpha, embed_J, law);
      const UnitGridFunction f = isometry_function(embed_f, embed_d);
      const IsometryReport r = isometry_check_with_retry(f, measure, embed_p, embed_samples, g.seed_or(0));
      nlohmann::json result = r.to_json();
      result["function"] = embed_f;
      result["d"] = embed_d;
      result["p"] = embed_p;
      result["measure"] = measure.to_json();
      return emit_json(g, result, std::abs(r.zscore) <= 3.0, out);
    }
    if (fno->parsed()) {
      const FnoHyper h = FnoHyper::from_json(read_json_file(hyper_path));
      const FnoParams params(h, read_params(params_path));
      const GridFunction u = GridFunction::from_json(read_json_file(input_path));
      const double y = forward(params, u);
      const std::string text = format_real(y) + "\n";
      if (!g.out.empty()) write_atomic(g.out, text);
      out << text;
      return 0;
    }
    if (quantize_cmd->parsed()) {
      const FnoHyper h = FnoHyper::from_json(read_json_file(hyper_path));
      const std::uint64_t seed = g.seed_or(0);
      const QuantGrid grid = QuantGrid::make(q_M, q_delta);
      const FnoParams params(h, random_theta(h, q_M, seed));
      const auto inputs = random_input_family(h.d, h.d_in, 4 * (h.kappa + 1), h.kappa + 1, q_inputs, seed);
      const double empirical = empirical_lipschitz(h, q_M, q_probes, inputs, seed);
      const double C = calibrate_lip_constant(h, q_M, empirical);
      const LipBoundInputs lb = lip_bound_inputs(h, q_M, C);
      const double bound = theoretical_lip_bound(lb);
      const CertificationReport report = certify_quantization(params, grid, inputs, bound);
      nlohmann::json result{{"hyper", h.to_json()},
                            {"grid", grid.to_json()},
                            {"seed", seed},
                            {"empirical_lipschitz", empirical},
                            {"C", C},
                            {"lip_bound", bound},
                            {"log2_lip_bound", theoretical_lip_bound_log2(lb)},
                            {"report", report.to_json()}};
      return emit_json(g, result, report.pass, out);
    }
    if (sweep->parsed() || chain_uniform->parsed() || chain_expectation->parsed()) {
      require(!g.config.empty(), ErrorCode::ConfigError, "this command needs --config");
      nlohmann::json doc = read_json_file(g.config);
      if (g.seed) doc["seed"] = *g.seed;
      const ExperimentConfig config = ExperimentConfig::from_json(doc);
      const std::string expected = sweep->parsed() ? "sweep" : (chain_uniform->parsed() ? "chain-uniform" : "chain-expectation");
      require(config.experiment == expected, ErrorCode::ConfigError,
              "config is for '" + config.experiment + "', not '" + expected + "'");
      return emit_table(g, run_experiment(config), out);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace lipent
