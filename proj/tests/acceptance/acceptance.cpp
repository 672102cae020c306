// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "../unit/oracles.hpp"
#include "lipent/experiments.hpp"
#include "lipent/fno.hpp"
#include "lipent/metricspace.hpp"
#include "lipent/packing.hpp"
#include "lipent/quantizer.hpp"
#include "lipent/randomfield.hpp"

using namespace lipent;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome sandwich_and_code_length() {
  std::mt19937_64 gen(20240501);
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const auto d = trial % 2 ? oracle::random_graph_metric(n, gen) : oracle::random_euclidean(n, 2, gen);
    const auto space = oracle::make_space(d);
    IndexSet subset;
    for (std::size_t i = 0; i < n; ++i)
      if (gen() % 4 != 0 || subset.empty()) subset.push_back(i);
    const double eps = d[0][1 + gen() % (n - 1)] * (0.2 + 0.6 * (gen() % 1000) / 1000.0);
    const auto s = sandwich_check(space, subset, space.all(), eps);
    const auto code = minimax_code_length(space, subset, space.all(), eps);
    const std::size_t cover = oracle::covering(d, subset, oracle::iota(n), eps);
    const bool good = s.holds && s.covering == cover && s.packing_3eps <= cover && cover <= s.packing &&
                      s.packing == oracle::packing(d, subset, eps) &&
                      s.packing_3eps == oracle::packing(d, subset, 3 * eps) &&
                      code.bits == static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(cover))));
    ok += good;
  }
  return {ok == 50, std::to_string(ok) + "/50 spaces"};
}

Outcome hat_certificate() {
  const auto circle = FiniteMetricSpace::circle(8, 8.0);
  const double eps = 1.0 / 6.0;
  const HatFamily f = build_hat_family(circle, eps);
  const auto v = verify_hat_family(f, circle);
  const auto cover = exact_covering_number(circle, circle.all(), circle.all(), 6 * eps);
  const double H = std::log2(static_cast<double>(cover.count));
  const double log_family = std::log2(static_cast<double>(f.size()));
  const bool pass = f.size() == 256 && v.exhaustive && v.ok && v.min_pair_distance >= 0.5 - 1e-12 &&
                    log_family == 8.0 && log_family >= H;
  return {pass, fmt("members=%.0f min_pair_sup=%.6g log2=%.0f H(K;1)=%.6g", static_cast<double>(f.size()),
                    v.min_pair_distance, log_family, H)};
}

Outcome gv_codes() {
  bool pass = true;
  std::string detail;
  for (int n : {8, 16, 24, 32}) {
    const SignCode c = gilbert_varshamov(n);
    int dmin = n + 1;
    for (std::size_t a = 0; a < c.words.size(); ++a)
      for (std::size_t b = a + 1; b < c.words.size(); ++b)
        dmin = std::min(dmin, std::popcount(c.words[a] ^ c.words[b]));
    const auto target = static_cast<std::size_t>(std::ceil(std::exp(n / 8.0)));
    const int need = (n + 3) / 4;
    pass = pass && c.words.size() >= target && dmin >= need;
    detail += "n=" + std::to_string(n) + ":" + std::to_string(c.words.size()) + "/" + std::to_string(target) +
              ",d=" + std::to_string(dmin) + " ";
  }
  return {pass, detail};
}

Outcome bump_families() {
  bool pass = true;
  std::string detail;
  for (auto [d, N] : {std::pair{1, 2}, std::pair{1, 4}, std::pair{2, 2}}) {
    int length = 1;
    for (int a = 0; a < d; ++a) length *= N;
    const BumpFamily f = build_bump_family(d, N, 4 * N * (d + 1), gilbert_varshamov(length));
    double max_sup = 0, max_lip = 0;
    for (std::size_t m = 0; m < f.size(); ++m) {
      max_sup = std::max(max_sup, f.grid_member(m).sup_abs());
      max_lip = std::max(max_lip, f.discrete_lipschitz(m));
    }
    double min_l1 = INFINITY;
    for (std::size_t a = 0; a < f.size(); ++a)
      for (std::size_t b = a + 1; b < f.size(); ++b) min_l1 = std::min(min_l1, f.l1_distance(a, b));
    const double bound = 1.0 / (8 * std::exp(1.0) * d * N);
    pass = pass && f.lambda() == 1.0 / (1 + d) && max_sup <= 1.0 && max_lip <= 1 + 1e-9 && min_l1 >= bound - 1e-9;
    detail += fmt("(%.0f,%.0f): sup=%.4g lip=%.6g", d, N, max_sup, max_lip) +
              fmt(" l1=%.4g>=%.4g; ", min_l1, bound);
  }
  return {pass, detail};
}

Outcome isometry() {
  const KLMeasure m = KLMeasure::power_law(1.0, 16, CoordinateLaw::Gaussian);
  const BumpFamily bumps = build_bump_family(1, 2, 8, gilbert_varshamov(2));
  const std::vector<std::pair<std::string, UnitGridFunction>> fs{
      {"constant", UnitGridFunction(1, 8, std::vector<double>(9, 0.5))},
      {"x1", UnitGridFunction::sample(1, 8, [](auto x) { return x[0]; })},
      {"bump", bumps.grid_member(1)}};
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 1;
  for (const auto& [name, f] : fs)
    for (double p : {1.0, 2.0}) {
      const auto r = isometry_check_with_retry(f, m, p, 100000, seed++);
      pass = pass && std::abs(r.zscore) <= 3.0;
      detail += name + fmt(" p=%.0f z=%.3f", p, r.zscore) + (r.retried ? "(retry)" : "") + "; ";
    }
  return {pass, detail};
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

Outcome fno_identities() {
  bool bracket = true;
  int hypers = 0;
  for (int d = 1; d <= 2; ++d)
    for (int dc = 1; dc <= 3; ++dc)
      for (int k = 1; k <= 3; ++k)
        for (int L = 1; L <= 3; ++L) {
          const auto c = param_count(FnoHyper{d, 1, 1, dc, k, L, Activation::Relu, BiasMode::Constant});
          bracket = bracket && c.q <= c.bound && c.bound <= 5 * c.q;
          ++hypers;
        }
  double pad_gap = 0, shift_gap = 0;
  std::uint64_t seed = 1;
  for (int d = 1; d <= 2; ++d)
    for (auto [dc, k, L, dc2, k2] :
         {std::tuple{1, 1, 1, 2, 1}, std::tuple{1, 1, 1, 1, 2}, std::tuple{2, 2, 2, 3, 3}, std::tuple{1, 2, 3, 3, 3}})
      for (Activation a : {Activation::Relu, Activation::Gelu}) {
        const FnoHyper s{d, 1, 1, dc, k, L, a, BiasMode::Constant};
        const FnoHyper t{d, 1, 1, dc2, k2, L, a, BiasMode::Constant};
        const FnoParams small(s, random_theta(s, 1.0, seed));
        const FnoParams big = zero_pad_embed(small, t);
        const int n = 2 * k2 + 1;
        for (const auto& u : random_input_family(d, 1, n, k2, 32, seed++)) {
          const double ref = forward(small, u);
          pad_gap = std::max(pad_gap, rel_gap(forward(big, u), ref));
          std::vector<int> off(d, 1);
          off[0] = n - 2;
          shift_gap = std::max(shift_gap, rel_gap(forward(big, shift(u, off)), forward(big, u)));
        }
      }
  return {bracket && pad_gap <= 1e-12 && shift_gap <= 1e-10,
          fmt("bracketing over %.0f hypers, pad gap %.3g, shift gap %.3g", hypers, pad_gap, shift_gap)};
}

Outcome quantization() {
  const FnoHyper h{1, 1, 1, 1, 1, 1, Activation::Relu, BiasMode::Constant};
  const double M = 1.0;
  const QuantGrid grid = QuantGrid::make(M, 0.01);
  bool certified = true;
  double worst = 0, bound = 0, C = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const FnoParams params(h, random_theta(h, M, seed));
    const auto inputs = random_input_family(1, 1, 8, 2, 64, seed);
    const double emp = empirical_lipschitz(h, M, 400, inputs, seed);
    C = std::max(C, calibrate_lip_constant(h, M, emp));
    const double lip = theoretical_lip_bound(lip_bound_inputs(h, M, calibrate_lip_constant(h, M, emp)));
    const auto r = certify_quantization(params, grid, inputs, lip);
    certified = certified && r.pass && r.inputs == 64;
    worst = std::max(worst, r.measured_err);
    bound = r.bound;
  }
  const BudgetSweep s = bit_budget_sweep(4, 64, 1, 1.0, 1.0);
  return {certified && s.within(2.0),
          fmt("8 seeds, max err=%.4g <= %.4g (max C=%.4g);", worst, bound, C) +
              fmt(" padded scaled in [%.3f, %.3f]; unpadded in [%.3f, %.3f]", s.lo, s.hi, s.raw_lo, s.raw_hi)};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome rerun(const std::string& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = ExperimentConfig::load(std::string(LIPENT_CONFIG_DIR) + "/" + config);
  const auto dir = std::filesystem::temp_directory_path() / "lipent_acceptance";
  std::filesystem::create_directories(dir);
  const std::string a = (dir / (config + ".1.csv")).string(), b = (dir / (config + ".2.csv")).string();
  const auto t1 = run_experiment(cfg);
  write_table(t1, a);
  write_table(run_experiment(cfg), b);
  const std::string x = slurp(a), y = slurp(b);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {x == y && !x.empty() && t1.pass && secs < 120.0,
          std::to_string(x.size()) + " bytes, identical=" + (x == y ? "yes" : "no") +
              ", table pass=" + (t1.pass ? "yes" : "no") + fmt(", %.2fs", secs)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "sandwich and code length", 10, sandwich_and_code_length},
      {2, "hat family certificate", 30, hat_certificate},
      {3, "Gilbert-Varshamov codes", 60, gv_codes},
      {4, "bump families", 60, bump_families},
      {5, "embedding isometry", 60, isometry},
      {6, "FNO identities", 120, fno_identities},
      {7, "quantization certificate and bit budget", 60, quantization},
      {8, "end-to-end determinism", 240,
       [] {
         const Outcome u = rerun("chain_uniform_circle8.json"), e = rerun("chain_expectation_gaussian.json");
         return Outcome{u.pass && e.pass, "uniform: " + u.detail + "; expectation: " + e.detail};
       }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_s;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.2fs < %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_s);
  }
  return failures == 0 ? 0 : 1;
}
