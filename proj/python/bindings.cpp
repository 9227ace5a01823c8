#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>

#include "robusthalf/agnostic.hpp"
#include "robusthalf/datagen.hpp"
#include "robusthalf/gadget.hpp"
#include "robusthalf/labelcover.hpp"
#include "robusthalf/oracle.hpp"

namespace py = pybind11;
using namespace robusthalf;

namespace {

Exponent exponent_from(double v) { return std::isinf(v) ? Exponent::infinity() : Exponent(v); }

Dataset dataset_from(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys, Exponent p) {
  if (xs.size() != ys.size()) throw std::invalid_argument("x and y have different lengths");
  if (xs.empty()) throw std::invalid_argument("need at least one sample to infer the dimension");
  Dataset data(xs.front().size(), p);
  for (std::size_t i = 0; i < xs.size(); ++i) data.push_back({xs[i], ys[i]});
  return data;
}

GadgetParams desk_params(const LabelCoverInstance& inst, std::optional<double> gamma,
                         std::optional<double> q_lc) {
  GadgetOverrides ov;
  ov.delta = inst.delta();
  ov.gamma = gamma;
  ov.q_lc = q_lc;
  return derive_params(inst.k(), inst.size(), GadgetMode::desk, ov);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust proper agnostic learning of L_p-margin halfspaces";

  py::class_<Exponent>(m, "Exponent")
      .def(py::init(&exponent_from))
      .def(py::init([](const std::string& s) { return Exponent::parse(s); }))
      .def_static("infinity", &Exponent::infinity)
      .def_property_readonly("is_infinite", &Exponent::is_infinite)
      .def_property_readonly("value", [](const Exponent& e) {
        return e.is_infinite() ? INFINITY : e.value();
      })
      .def("__str__", &Exponent::to_string)
      .def("__repr__", [](const Exponent& e) { return "Exponent(" + e.to_string() + ")"; })
      .def(py::self == py::self);
  py::implicitly_convertible<double, Exponent>();
  py::implicitly_convertible<std::string, Exponent>();
  m.def("dual_exponent", &dual_exponent);

  py::class_<Halfspace>(m, "Halfspace")
      .def(py::init<std::vector<double>, Exponent>(), py::arg("w"), py::arg("q"))
      .def_property_readonly("w", &Halfspace::weights)
      .def_property_readonly("q", &Halfspace::q)
      .def_property_readonly("dimension", &Halfspace::dimension)
      .def("norm", &Halfspace::norm)
      .def("normalized", &Halfspace::normalized);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from), py::arg("x"), py::arg("y"), py::arg("p"))
      .def_property_readonly("dimension", &Dataset::dimension)
      .def_property_readonly("p", &Dataset::p)
      .def("__len__", &Dataset::size)
      .def_property_readonly("x", [](const Dataset& d) {
        std::vector<std::vector<double>> out;
        for (const auto& s : d.samples()) out.push_back(s.x);
        return out;
      })
      .def_property_readonly("y", [](const Dataset& d) {
        std::vector<int> out;
        for (const auto& s : d.samples()) out.push_back(s.y);
        return out;
      });

  m.def("margin_error", &margin_error, py::arg("w"), py::arg("data"), py::arg("gamma"));
  m.def("robust_error", &robust_error, py::arg("w"), py::arg("data"), py::arg("gamma"));
  m.def(
      "worst_case_perturbation",
      [](const Halfspace& w, std::vector<double> x, int y, double gamma, Exponent p) {
        return worst_case_perturbation(w, {std::move(x), y}, gamma, p);
      },
      py::arg("w"), py::arg("x"), py::arg("y"), py::arg("gamma"), py::arg("p"));
  m.def(
      "mistake_budget",
      [](std::size_t d, Exponent p, double gamma, double nu) {
        return mistake_budget(d, p, MarginGap::relaxed(gamma, nu));
      },
      py::arg("dimension"), py::arg("p"), py::arg("gamma"), py::arg("nu"));

  py::class_<EmpiricalResult>(m, "EmpiricalResult")
      .def_readonly("w", &EmpiricalResult::w)
      .def_readonly("error", &EmpiricalResult::error)
      .def_readonly("best_run", &EmpiricalResult::best_run)
      .def_readonly("updates", &EmpiricalResult::updates)
      .def_readonly("budget", &EmpiricalResult::budget)
      .def_readonly("run_errors", &EmpiricalResult::run_errors);
  m.def(
      "learn_empirical",
      [](const Dataset& data, double gamma, double nu, double delta, std::size_t restarts,
         std::uint64_t seed, const std::string& policy, std::size_t jobs) {
        EmpiricalOptions o;
        if (policy == "paper") o.policy = RunPolicy::paper;
        else if (policy != "best_prefix") throw std::invalid_argument("policy must be paper or best_prefix");
        o.jobs = jobs;
        py::gil_scoped_release release;
        return learn_empirical(data, gamma, nu, delta, restarts, seed, o);
      },
      py::arg("data"), py::arg("gamma"), py::arg("nu") = 0.5, py::arg("delta") = 0.5,
      py::arg("restarts") = 64, py::arg("seed") = 1, py::arg("policy") = "best_prefix",
      py::arg("jobs") = 1);

  py::class_<SubsetResult>(m, "SubsetResult")
      .def_readonly("rate", &SubsetResult::rate)
      .def_readonly("errors", &SubsetResult::errors)
      .def_readonly("w", &SubsetResult::w)
      .def_readonly("error_set", &SubsetResult::error_set);
  m.def("opt_margin_subset", &opt_margin_subset, py::arg("data"), py::arg("gamma"), py::arg("tol") = 1e-6);
  py::class_<GridResult>(m, "GridResult")
      .def_readonly("rate", &GridResult::rate)
      .def_readonly("errors", &GridResult::errors)
      .def_readonly("w", &GridResult::w)
      .def_readonly("cell_radius", &GridResult::cell_radius);
  m.def("opt_margin_grid", &opt_margin_grid, py::arg("data"), py::arg("gamma"), py::arg("resolution"));
  m.def(
      "max_min_margin", [](const Dataset& d) {
        const auto c = max_min_margin(d);
        return py::make_tuple(c.lower, c.upper, c.witness);
      },
      py::arg("data"));

  py::class_<PlantedDataset>(m, "PlantedDataset")
      .def_readonly("data", &PlantedDataset::data)
      .def_readonly("w", &PlantedDataset::w)
      .def_readonly("flipped", &PlantedDataset::flipped);
  m.def(
      "planted_margin_dataset",
      [](std::size_t d, Exponent p, double gamma, std::size_t n, double eta, std::uint64_t seed,
         bool boundary) {
        Rng rng(seed);
        PlantedOptions o;
        o.noise = boundary ? NoiseMode::boundary : NoiseMode::uniform;
        return planted_margin_dataset(d, p, gamma, n, eta, rng, o);
      },
      py::arg("dimension"), py::arg("p"), py::arg("gamma"), py::arg("m"), py::arg("eta") = 0.0,
      py::arg("seed") = 1, py::arg("boundary_noise") = false);
  m.def("read_dataset", py::overload_cast<const std::string&>(&read_dataset));
  m.def("write_dataset", py::overload_cast<const std::string&, const Dataset&>(&write_dataset));
  m.def("read_model", py::overload_cast<const std::string&>(&read_model));
  m.def("write_model", py::overload_cast<const std::string&, const Halfspace&>(&write_model));

  m.def("rademacher_tail", [](std::size_t n, unsigned c) { return static_cast<double>(rademacher_tail(n, c)); },
        py::arg("m"), py::arg("c_percent"));
  m.def(
      "anticoncentration_constant",
      [](std::size_t lo, std::size_t hi) {
        const auto a = anticoncentration_constant(lo, hi);
        return py::dict(py::arg("C") = a.C, py::arg("m0") = a.m0,
                        py::arg("worst_tail") = static_cast<double>(a.worst_tail),
                        py::arg("worst_m") = a.worst_m);
      },
      py::arg("m_lo"), py::arg("m_hi"));

  py::class_<LabelCoverInstance>(m, "LabelCoverInstance")
      .def_property_readonly("k", &LabelCoverInstance::k)
      .def_property_readonly("groups", &LabelCoverInstance::groups)
      .def_property_readonly("delta", &LabelCoverInstance::delta)
      .def_property_readonly("right_count", &LabelCoverInstance::right_count)
      .def_property_readonly("size", &LabelCoverInstance::size);
  m.def(
      "random_instance",
      [](std::size_t k, std::size_t delta, std::size_t su, std::size_t sv, std::uint64_t seed) {
        Rng rng(seed);
        auto g = random_instance(k, delta, su, sv, true, rng);
        return py::make_tuple(g.instance, *g.planted);
      },
      py::arg("k"), py::arg("delta"), py::arg("sigma_u") = 2, py::arg("sigma_v") = 2, py::arg("seed") = 1);
  m.def("value", &value);
  m.def("weak_value", &weak_value);
  m.def(
      "verify_completeness",
      [](const LabelCoverInstance& inst, const Labeling& phi, std::optional<double> gamma,
         std::optional<double> q_lc) {
        const auto params = desk_params(inst, gamma, q_lc);
        const auto r = verify_completeness(inst, params, phi);
        std::vector<double> per_group(r.label_cover.per_group.begin(), r.label_cover.per_group.end());
        return py::dict(py::arg("passed") = r.passed, py::arg("deterministic_passed") = r.deterministic_passed,
                        py::arg("label_cover") = per_group, py::arg("error_bound") = r.error_bound,
                        py::arg("eps") = r.eps, py::arg("failures") = r.failures);
      },
      py::arg("instance"), py::arg("labeling"), py::arg("gamma") = py::none(), py::arg("q_lc") = py::none());
}
