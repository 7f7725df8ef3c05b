// Copyright 2026 The ldphh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured results cross the boundary as JSON text and
// are decoded by the package's __init__.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ldphh/analysis.hpp"
#include "ldphh/baselines.hpp"
#include "ldphh/datagen.hpp"
#include "ldphh/error.hpp"
#include "ldphh/freq_oracle.hpp"
#include "ldphh/harness.hpp"
#include "ldphh/pem.hpp"

namespace py = pybind11;
using namespace ldphh;

namespace {

DistributionSpec make_dist(const std::string& kind, double s, std::size_t drop, double rate,
                           std::size_t support) {
  if (kind == "zipf") return DistributionSpec::zipf(s, support, drop);
  if (kind == "exp") return DistributionSpec::exponential(rate, support);
  throw InvalidArgument("unknown distribution '" + kind + "'");
}

PemConfig make_pem(unsigned m, std::size_t k, std::optional<unsigned> eta,
                   std::uint64_t limit, double eps) {
  return eta ? PemConfig::uniform(m, k, *eta, limit, eps) : plan(m, k, limit, PrivacyBudget(eps));
}

RunSpec make_spec(const std::string& protocol, double eps, std::size_t k,
                  std::optional<double> theta, std::optional<unsigned> eta,
                  const std::string& variant, double final_frac, std::uint64_t limit) {
  RunSpec s;
  s.protocol = protocol;
  s.eps = eps;
  s.k = k;
  s.theta = theta;
  s.eta = eta;
  s.variant = parse_variant(variant);
  s.final_fraction = final_frac;
  s.query_limit = limit;
  return s;
}

std::vector<std::string> hex_values(const Dataset& d) {
  std::vector<std::string> out;
  out.reserve(d.n());
  for (const auto& v : d.values) out.push_back(v.to_hex());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Locally differentially private heavy-hitter identification";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<Infeasible> infeasible(m, "InfeasibleError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const Infeasible& e) {
      py::set_error(infeasible, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("m", &Dataset::m)
      .def_property_readonly("n", &Dataset::n)
      .def("values_hex", &hex_values)
      .def("__len__", &Dataset::n)
      .def("save", [](const Dataset& d, const std::string& path) {
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path);
        save(out, d);
      });

  m.def("generate",
        [](const std::string& dist, std::size_t n, unsigned bits, std::uint64_t seed, double s,
           std::size_t drop, double rate, std::size_t support) {
          return generate({make_dist(dist, s, drop, rate, support), bits, n, seed});
        },
        py::arg("dist"), py::arg("n"), py::arg("m"), py::arg("seed") = 1, py::arg("s") = 1.5,
        py::arg("drop") = 0, py::arg("rate") = 0.05, py::arg("support") = 1024);
  m.def("from_ints",
        [](const std::vector<std::uint64_t>& xs, unsigned bits) {
          Dataset d{bits, {}};
          for (auto x : xs) d.values.push_back(BitValue::from_uint(x, bits));
          if (d.values.empty()) throw InvalidArgument("dataset contains no values");
          return d;
        },
        py::arg("values"), py::arg("m"));
  m.def("load",
        [](const std::string& path, unsigned bits, const std::string& mode) {
          if (mode != "int" && mode != "text") throw InvalidArgument("mode must be int or text");
          return load(path, bits, mode == "int" ? LoadMode::kInt : LoadMode::kText);
        },
        py::arg("path"), py::arg("m"), py::arg("mode") = "int");
  m.def("exact_counts",
        [](const Dataset& d, std::size_t top) {
          std::vector<std::pair<std::string, double>> out;
          const GroundTruth head = exact_counts(d).top(top);
          for (const auto& s : head.ranked()) {
            out.emplace_back(s.value.to_hex(), s.count);
          }
          return out;
        },
        py::arg("data"), py::arg("top"));

  m.def("zipf_freqs", &zipf_freqs, py::arg("s"), py::arg("support"), py::arg("drop") = 0);
  m.def("exp_freqs", &exp_freqs, py::arg("rate"), py::arg("support"));

  m.def("grr_params",
        [](std::uint32_t d, double eps) {
          const auto g = GrrParams::make(d, PrivacyBudget(eps));
          return std::pair{g.p, g.q};
        },
        py::arg("d"), py::arg("eps"));
  m.def("olh_params",
        [](double eps) {
          const auto o = OlhParams::make(PrivacyBudget(eps));
          return std::tuple{o.d_prime, o.p, o.q};
        },
        py::arg("eps"));
  m.def("grr_variance",
        [](double n, std::uint32_t d, double eps) { return grr_variance(n, d, PrivacyBudget(eps)); },
        py::arg("n"), py::arg("d"), py::arg("eps"));
  m.def("olh_variance", [](double n, double eps) { return olh_variance(n, PrivacyBudget(eps)); },
        py::arg("n"), py::arg("eps"));
  m.def("grr_ldp_ratio",
        [](std::uint32_t d, double eps) { return ldp_ratio(GrrParams::make(d, PrivacyBudget(eps))); },
        py::arg("d"), py::arg("eps"));

  m.def("_plan",
        [](unsigned bits, std::size_t k, std::uint64_t limit, double eps) {
          return plan(bits, k, limit, PrivacyBudget(eps)).to_json().dump();
        },
        py::arg("m"), py::arg("k"), py::arg("query_limit"), py::arg("eps"));
  m.def("_run",
        [](const Dataset& d, const std::string& protocol, double eps, std::size_t k,
           std::uint64_t seed, std::optional<double> theta, std::optional<unsigned> eta,
           const std::string& variant, double final_frac, std::uint64_t limit) {
          const RunSpec spec = make_spec(protocol, eps, k, theta, eta, variant, final_frac, limit);
          py::gil_scoped_release release;
          return to_json(run_protocol(d, exact_counts(d), spec, seed)).dump();
        },
        py::arg("data"), py::arg("protocol"), py::arg("eps"), py::arg("k"), py::arg("seed"),
        py::arg("theta"), py::arg("eta"), py::arg("variant"), py::arg("final_frac"),
        py::arg("query_limit"));
  m.def("_compare",
        [](const Dataset& d, const std::vector<std::string>& protocols,
           const std::vector<double>& eps, std::size_t k, unsigned reps, std::uint64_t seed,
           std::uint64_t limit) {
          ExperimentSpec exp;
          for (const auto& p : protocols) {
            for (double e : eps) {
              exp.runs.push_back(make_spec(p, e, k, std::nullopt, std::nullopt, "split", 0.1, limit));
            }
          }
          exp.reps = reps;
          exp.master_seed = seed;
          py::gil_scoped_release release;
          std::ostringstream out;
          out << kCsvHeader << '\n';
          for (const auto& row : run_experiment(d, exp).rows) out << to_csv(row) << '\n';
          return out.str();
        },
        py::arg("data"), py::arg("protocols"), py::arg("eps"), py::arg("k"), py::arg("reps"),
        py::arg("seed"), py::arg("query_limit"));
  m.def("_analyze",
        [](const std::string& dist, double s, std::size_t drop, double rate, std::size_t support,
           unsigned bits, std::size_t k, double n, double eps, std::optional<unsigned> eta,
           std::uint64_t limit) {
          const auto cfg = make_pem(bits, k, eta, limit, eps);
          return to_json(analyze(make_dist(dist, s, drop, rate, support), cfg, n)).dump();
        },
        py::arg("dist"), py::arg("s"), py::arg("drop"), py::arg("rate"), py::arg("support"),
        py::arg("m"), py::arg("k"), py::arg("n"), py::arg("eps"), py::arg("eta"),
        py::arg("query_limit"));
  m.def("_optimize",
        [](const std::string& dist, double s, std::size_t drop, double rate, std::size_t support,
           unsigned bits, std::size_t k, double n, double eps, std::uint64_t limit,
           const std::string& weights, bool vary) {
          const auto w = weights == "ncr" ? WeightScheme::ncr(k) : WeightScheme::f1(k);
          if (weights != "ncr" && weights != "f1") throw InvalidArgument("weights must be f1 or ncr");
          const auto d = make_dist(dist, s, drop, rate, support);
          const auto cfg = optimize(d, bits, k, n, PrivacyBudget(eps), limit, w, vary);
          return to_json(analyze(d, cfg, n)).dump();
        },
        py::arg("dist"), py::arg("s"), py::arg("drop"), py::arg("rate"), py::arg("support"),
        py::arg("m"), py::arg("k"), py::arg("n"), py::arg("eps"), py::arg("query_limit"),
        py::arg("weights"), py::arg("vary_cand_size"));

  m.def("min_population",
        [](double f, double eps, double multiple, std::optional<int> sd_decimals) {
          return min_population(f, PrivacyBudget(eps), multiple, sd_decimals);
        },
        py::arg("f"), py::arg("eps"), py::arg("multiple"), py::arg("sd_decimals") = 1);
  m.def("lemma_E", &lemma_E, py::arg("x"));
  m.def("lemma_E_check", &lemma_E_check, py::arg("eps"), py::arg("g"));
  m.def("compare_partition_vs_split",
        [](double n_i, double f, std::size_t k, double N_i, double eps, unsigned g) {
          const auto c = compare_partition_vs_split(n_i, f, k, N_i, eps, g);
          return std::pair{c.p1, c.p2};
        },
        py::arg("n_i"), py::arg("f"), py::arg("k"), py::arg("N_i"), py::arg("eps"), py::arg("g"));
  m.def("joint_estimate",
        [](double I_ab, double n, double n_a, double n_b, double p, double q) {
          return joint_estimate({I_ab, n, n_a, n_b, p, q});
        },
        py::arg("I_ab"), py::arg("n"), py::arg("n_a"), py::arg("n_b"), py::arg("p"), py::arg("q"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("normal_inv_cdf", &normal_inv_cdf, py::arg("p"));
}
