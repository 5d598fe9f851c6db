#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "disambig/benchmark.hpp"
#include "disambig/engine.hpp"
#include "disambig/minifn/interp.hpp"
#include "disambig/minifn/parser.hpp"
#include "disambig/minifn/printer.hpp"
#include "disambig/minifn/typecheck.hpp"
#include "disambig/report.hpp"

namespace py = pybind11;
using namespace disambig;

namespace {

minifn::FunctionDef checked(const std::string& source) {
  auto def = minifn::parse(source);
  minifn::typecheck(def);
  return def;
}

engine::EngineConfig config_from(const std::string& config_json) {
  return engine::EngineConfig::from_json(nlohmann::json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ambiguity detection for function specs (native core)";

  py::register_exception<acquisition::SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<engine::EmptySpaceError>(m, "EmptySpaceError", PyExc_RuntimeError);
  py::register_exception<minifn::ParseError>(m, "ParseError", PyExc_SyntaxError);
  py::register_exception<minifn::TypeError>(m, "MiniFnTypeError", PyExc_TypeError);

  m.def(
      "run",
      [](const std::string& spec_text, const std::string& corpus, const std::string& config) {
        auto spec = acquisition::parse_fnspec(spec_text);
        auto cfg = config_from(config);
        py::gil_scoped_release release;
        auto r = engine::run_pipeline(spec, acquisition::offline_provider(corpus), cfg);
        return report::to_json_text(r.report);
      },
      py::arg("spec"), py::arg("corpus"), py::arg("config") = "{}",
      "Run the pipeline on .fnspec text over a corpus directory; returns report JSON.");

  m.def(
      "render",
      [](const std::string& spec_text, const std::string& corpus, const std::string& config) {
        auto spec = acquisition::parse_fnspec(spec_text);
        auto cfg = config_from(config);
        py::gil_scoped_release release;
        auto r = engine::run_pipeline(spec, acquisition::offline_provider(corpus), cfg);
        return report::render_partial_examples(r.report);
      },
      py::arg("spec"), py::arg("corpus"), py::arg("config") = "{}");

  m.def(
      "evaluate",
      [](const std::string& source, const std::string& args, std::uint64_t fuel) {
        auto def = checked(source);
        std::vector<minifn::Type> types;
        for (const auto& p : def.params) types.push_back(p.type);
        return minifn::eval_call(def, minifn::parse_values(args, types), fuel).describe();
      },
      py::arg("source"), py::arg("args"), py::arg("fuel") = minifn::kDefaultFuel,
      "Call a MiniFn function on literal arguments; returns the outcome text.");

  m.def(
      "format_source", [](const std::string& source) { return minifn::print(checked(source)); },
      py::arg("source"));

  m.def(
      "bench",
      [](const std::string& dataset, std::size_t k, const std::string& config) {
        auto cases = benchmark::load_dataset(dataset);
        auto cfg = config_from(config);
        py::gil_scoped_release release;
        return benchmark::matrix_json(benchmark::run_matrix(cases, k, cfg)).dump();
      },
      py::arg("dataset"), py::arg("k") = 5, py::arg("config") = "{}");
}
