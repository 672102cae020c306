#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "lipent/errors.hpp"
#include "lipent/experiments.hpp"
#include "lipent/fno.hpp"
#include "lipent/metricspace.hpp"
#include "lipent/packing.hpp"
#include "lipent/quantizer.hpp"
#include "lipent/randomfield.hpp"

namespace py = pybind11;
using namespace lipent;

namespace {

// JSON crosses the boundary through the json module: dict in, dict out.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

FiniteMetricSpace space_arg(const py::handle& obj) { return space_from_json(from_py(obj)); }

}  // namespace

PYBIND11_MODULE(_lipent, m) {
  m.doc() = "Metric entropy, packing certificates and quantized Fourier neural operators";

  static py::exception<Error> error(m, "LipentError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, ("[" + std::string(to_string(e.code())) + "] " + e.what()).c_str());
    }
  });

  m.def(
      "code_length",
      [](const py::dict& space, double eps) {
        const FiniteMetricSpace s = space_arg(space);
        const CodeLengthReport r = minimax_code_length(s, s.all(), s.all(), eps);
        const SandwichReport w = sandwich_check(s, s.all(), s.all(), eps);
        return to_py({{"covering", r.covering},
                      {"entropy", r.entropy},
                      {"bits", r.bits},
                      {"covering_restricted", r.covering_restricted},
                      {"bits_restricted", r.bits_restricted},
                      {"packing_3eps", w.packing_3eps},
                      {"packing", w.packing},
                      {"sandwich_holds", w.holds}});
      },
      py::arg("space"), py::arg("eps"),
      "Covering number, entropy, code length and the packing sandwich of a space spec.");

  m.def(
      "hat_family",
      [](const py::dict& space, double eps, std::uint64_t seed) {
        const FiniteMetricSpace s = space_arg(space);
        const HatFamily f = build_hat_family(s, eps);
        const HatVerification v = verify_hat_family(f, s, seed);
        nlohmann::json j = f.manifest();
        j["min_pair_distance"] = v.min_pair_distance;
        j["max_lipschitz"] = v.max_lipschitz;
        j["ok"] = v.ok;
        return to_py(j);
      },
      py::arg("space"), py::arg("eps"), py::arg("seed") = 0);

  m.def(
      "gilbert_varshamov", [](int n) { return to_py(gilbert_varshamov(n).manifest()); }, py::arg("n"));

  m.def(
      "bump_family",
      [](int d, int N, int grid) {
        int length = 1;
        for (int a = 0; a < d; ++a) length *= N;
        const BumpFamily f = build_bump_family(d, N, grid, gilbert_varshamov(length));
        const BumpVerification v = verify_bump_family(f);
        nlohmann::json j = f.manifest();
        j["min_pair_l1"] = v.min_pair_l1;
        j["separation_bound"] = v.separation_bound;
        j["max_sup"] = v.max_sup;
        j["max_lipschitz"] = v.max_lipschitz;
        j["ok"] = v.ok;
        return to_py(j);
      },
      py::arg("d"), py::arg("N"), py::arg("grid"));

  m.def(
      "isometry_check",
      [](const std::vector<double>& values, int d, int resolution, const py::dict& measure, double p,
         std::size_t samples, std::uint64_t seed) {
        const UnitGridFunction f(d, resolution, values);
        return to_py(isometry_check(f, KLMeasure::from_json(from_py(measure)), p, samples, seed).to_json());
      },
      py::arg("values"), py::arg("d"), py::arg("resolution"), py::arg("measure"), py::arg("p"),
      py::arg("samples"), py::arg("seed") = 0,
      "Monte-Carlo p-th moment of f o h_d against grid quadrature of |f|^p.");

  m.def(
      "param_count",
      [](const py::dict& hyper) {
        const ParamCount c = param_count(FnoHyper::from_json(from_py(hyper)));
        return to_py({{"q", c.q}, {"bound", c.bound}, {"lower_ok", c.lower_ok}, {"upper_ok", c.upper_ok}});
      },
      py::arg("hyper"));

  m.def(
      "param_length", [](const py::dict& hyper) { return param_length(FnoHyper::from_json(from_py(hyper))); },
      py::arg("hyper"));

  m.def(
      "forward",
      [](const py::dict& hyper, std::vector<double> theta, std::vector<double> values, int resolution, int channels) {
        const FnoHyper h = FnoHyper::from_json(from_py(hyper));
        const FnoParams params(h, std::move(theta));
        return forward(params, GridFunction(h.d, resolution, channels, std::move(values)));
      },
      py::arg("hyper"), py::arg("theta"), py::arg("values"), py::arg("resolution"), py::arg("channels") = 1,
      "Spatially averaged output of the FNO on a periodic grid input.");

  m.def(
      "zero_pad_embed",
      [](const py::dict& small, std::vector<double> theta, const py::dict& target) {
        const FnoParams p(FnoHyper::from_json(from_py(small)), std::move(theta));
        return zero_pad_embed(p, FnoHyper::from_json(from_py(target))).theta();
      },
      py::arg("small"), py::arg("theta"), py::arg("target"));

  m.def(
      "quantize",
      [](const std::vector<double>& theta, double M, double delta) {
        return quantize(theta, QuantGrid::make(M, delta));
      },
      py::arg("theta"), py::arg("M"), py::arg("delta"));

  m.def(
      "theoretical_lip_bound_log2",
      [](int L, int d_c, int kappa, int d, double M, double C) {
        return theoretical_lip_bound_log2({L, d_c, kappa, d, M, C});
      },
      py::arg("L"), py::arg("d_c"), py::arg("kappa"), py::arg("d"), py::arg("M"), py::arg("C") = 0.0);

  m.def(
      "bit_budget_asymptotic",
      [](std::uint64_t q, int d, double gamma, double C) { return to_py(bit_budget_asymptotic(q, d, gamma, C).to_json()); },
      py::arg("q"), py::arg("d") = 1, py::arg("gamma") = 1.0, py::arg("C") = 1.0);

  m.def(
      "run_experiment",
      [](const py::dict& config) {
        const ResultTable t = run_experiment(ExperimentConfig::from_json(from_py(config)));
        nlohmann::json meta = t.metadata;
        return py::make_tuple(t.to_csv(), to_py(meta), t.pass);
      },
      py::arg("config"), "Runs a validated experiment config; returns (csv, metadata, pass).");

  m.attr("__version__") = kVersion;
}
