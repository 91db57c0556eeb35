#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fragchain/analytic.hpp"
#include "fragchain/config.hpp"
#include "fragchain/duality.hpp"
#include "fragchain/engine.hpp"
#include "fragchain/estimators.hpp"
#include "fragchain/partition.hpp"
#include "fragchain/suites.hpp"

namespace py = pybind11;
using namespace fragchain;

namespace {

// pybind11 holders cannot be const; laws are never mutated through Python.
using PyLaw = std::shared_ptr<DislocationLaw>;
PyLaw to_py(const LawPtr& law) { return std::const_pointer_cast<DislocationLaw>(law); }

std::vector<double> sizes_at(const EventLog& log, double t) { return log.fragments_at(t).sizes(); }

py::dict report_to_dict(const TestReport& r) {
  py::dict d;
  d["criterion"] = r.criterion;
  d["statistic"] = r.statistic;
  d["expected"] = r.expected;
  d["tolerance"] = r.tolerance;
  d["p_value"] = r.p_value;
  d["pass"] = r.pass;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fragchain, m) {
  m.doc() = "Random fragmentation chains: laws, exponents, simulation and checks";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<UnknownLawError>(m, "UnknownLawError", PyExc_KeyError);
  py::register_exception<InvalidConfigError>(m, "InvalidConfigError", PyExc_ValueError);
  py::register_exception<UnknownSuiteError>(m, "UnknownSuiteError", PyExc_KeyError);

  py::class_<DislocationLaw, PyLaw>(m, "Law")
      .def_property_readonly("name", &DislocationLaw::name)
      .def_property_readonly("params", &DislocationLaw::params)
      .def_property_readonly("conservative", [](const DislocationLaw& l) { return l.metadata().conservative; })
      .def_property_readonly("geometric", [](const DislocationLaw& l) { return l.metadata().geometric; })
      .def("sample", [](const DislocationLaw& l, std::uint64_t seed, std::uint64_t stream) {
        RngStream rng(seed, stream);
        return l.sample(rng).sizes();
      }, py::arg("seed") = 0, py::arg("stream") = 0);

  m.def("make_law", [](const std::string& name, const std::map<std::string, double>& params) {
    return to_py(make_law(name, params));
  }, py::arg("name"), py::arg("params") = std::map<std::string, double>{});

  py::class_<KappaFunction>(m, "Kappa")
      .def(py::init([](PyLaw law, double c) { return KappaFunction(std::move(law), ErosionParams{c}); }),
           py::arg("law"), py::arg("erosion") = 0.0)
      .def("__call__", &KappaFunction::value)
      .def("derivative", &KappaFunction::derivative, py::arg("p"), py::arg("order") = 1)
      .def("malthusian", py::overload_cast<>(&KappaFunction::malthusian, py::const_))
      .def("p_bar", py::overload_cast<>(&KappaFunction::p_bar, py::const_))
      .def_property_readonly("closed_form", &KappaFunction::closed_form);

  m.def("moment_series", &moment_series, py::arg("kappa"), py::arg("p"), py::arg("t"), py::arg("alpha"));
  m.def("rho_moments", [](const KappaFunction& k, double alpha, std::size_t max_k) {
    return rho_moments(k, alpha, max_k).moments;
  }, py::arg("kappa"), py::arg("alpha"), py::arg("max_k"));
  m.def("exit_density", &exit_density, py::arg("kappa"), py::arg("x"));
  m.def("tagged_laplace", &tagged_laplace, py::arg("kappa"), py::arg("q"), py::arg("t"));

  py::class_<SimConfig>(m, "SimConfig")
      .def_static("from_json", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("to_json", &config_to_json)
      .def("validate", &SimConfig::validate)
      .def_property("law", [](const SimConfig& c) { return to_py(c.law); },
                    [](SimConfig& c, PyLaw law) { c.law = std::move(law); })
      .def_readwrite("erosion", &SimConfig::erosion)
      .def_readwrite("alpha", &SimConfig::alpha)
      .def_readwrite("epsilon", &SimConfig::epsilon)
      .def_readwrite("horizon", &SimConfig::horizon)
      .def_readwrite("snapshot_times", &SimConfig::snapshot_times)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("replicas", &SimConfig::replicas)
      .def_readwrite("event_budget", &SimConfig::event_budget)
      .def_property("mode", [](const SimConfig& c) { return std::string(to_string(c.mode)); },
                    [](SimConfig& c, const std::string& s) { c.mode = sim_mode_from_string(s); });

  py::class_<EventLog>(m, "EventLog")
      .def_property_readonly("replica", &EventLog::replica)
      .def_property_readonly("horizon", &EventLog::horizon)
      .def_property_readonly("event_count", [](const EventLog& l) { return l.events().size(); })
      .def_property_readonly("event_times", [](const EventLog& l) {
        std::vector<double> out;
        for (const auto& e : l.events()) out.push_back(e.time);
        return out;
      })
      .def("fragments_at", &sizes_at, py::arg("t"))
      .def("dust_at", &EventLog::dust_at, py::arg("t"))
      .def("first_event_time", &EventLog::first_event_time);

  m.def("run", [](const SimConfig& cfg, std::size_t replica) {
    py::gil_scoped_release release;
    return run(cfg, replica);
  }, py::arg("config"), py::arg("replica") = 0);
  m.def("run_replicas", [](const SimConfig& cfg) {
    py::gil_scoped_release release;
    return run_replicas(cfg);
  }, py::arg("config"));

  m.def("lln_functional", [](const SimConfig& cfg, double t) {
    const auto e = lln_functional(cfg, t, clamped_identity);
    return py::make_tuple(e.mean, e.std_error);
  }, py::arg("config"), py::arg("t"));

  m.def("paintbox", [](const std::vector<double>& sizes, const std::vector<double>& uniforms) {
    return paintbox(rank(sizes), uniforms).to_string();
  }, py::arg("sizes"), py::arg("uniforms"));

  py::class_<MergeEvent>(m, "MergeEvent")
      .def_readonly("coal_time", &MergeEvent::coal_time)
      .def_readonly("n_before", &MergeEvent::n_before)
      .def_readonly("rank_i", &MergeEvent::rank_i)
      .def_readonly("rank_j", &MergeEvent::rank_j)
      .def_readonly("cut", &MergeEvent::cut);
  m.def("coalescent_merges", [](std::uint64_t seed, std::uint64_t replica) {
    RngStream rng(seed, replica);
    return reverse(build_cut_process(1.0, rng), coalescent_grid()).merges;
  }, py::arg("seed") = 7, py::arg("replica") = 0);

  m.def("suite_ids", &suite_ids);
  m.def("run_suite", [](const std::string& id, std::uint64_t seed) {
    std::vector<TestReport> reports;
    {
      py::gil_scoped_release release;
      reports = run_suite(id, SuiteOptions{seed});
    }
    py::list out;
    for (const auto& r : reports) out.append(report_to_dict(r));
    return out;
  }, py::arg("id"), py::arg("seed") = 7);
}
