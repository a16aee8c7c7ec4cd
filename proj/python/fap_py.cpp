#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fap/driver.hpp"
#include "fap/oracle.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const fap::Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return py::bool_(*b);
  // Through the decimal string, so big values survive.
  return py::int_(py::str(fap::to_string(v)));
}

py::dict to_python(const fap::Valuation& v) {
  py::dict out;
  for (const auto& [name, value] : v.scalars()) out[py::str(name)] = to_python(value);
  for (const auto& [cell, value] : v.cells()) out[py::str(fap::to_string(cell))] = to_python(value);
  return out;
}

py::dict to_python(const fap::Leaf& leaf) {
  py::dict out;
  switch (leaf.kind) {
    case fap::Leaf::Kind::Success:
      out["kind"] = "success";
      out["valuation"] = to_python(leaf.valuation);
      break;
    case fap::Leaf::Kind::Fail:
      out["kind"] = "fail";
      break;
    case fap::Leaf::Kind::Error:
      out["kind"] = "error";
      out["cause"] = std::string(fap::to_string(leaf.cause));
      break;
  }
  return out;
}

fap::ParseOptions constants(const std::map<std::string, long>& c) {
  fap::ParseOptions opts;
  for (const auto& [k, v] : c) opts.constants[k] = v;
  return opts;
}

fap::EngineConfig config(const std::string& negation, const std::string& implication, bool pedantic,
                         std::optional<std::uint64_t> max_steps, std::optional<std::uint64_t> solution_limit,
                         bool internal) {
  fap::EngineConfig cfg;
  if (negation == "strict") {
    cfg.negation = fap::NegationMode::Strict;
  } else if (negation == "liberal") {
    cfg.negation = fap::NegationMode::Liberal;
  } else {
    throw py::value_error("negation must be 'strict' or 'liberal'");
  }
  if (implication == "strict") {
    cfg.implication = fap::ImplicationMode::Strict;
  } else if (implication == "negor") {
    cfg.implication = fap::ImplicationMode::NegOr;
  } else if (implication == "guarded") {
    cfg.implication = fap::ImplicationMode::Guarded;
  } else if (implication == "combined") {
    cfg.implication = fap::ImplicationMode::Combined;
  } else {
    throw py::value_error("implication must be 'strict', 'negor', 'guarded' or 'combined'");
  }
  cfg.pedantic = pedantic;
  cfg.max_steps = max_steps;
  cfg.solution_limit = solution_limit;
  cfg.report_internal_bindings = internal;
  return cfg;
}

#define FAP_ENGINE_ARGS                                                                                    \
  py::kw_only(), py::arg("assignments") = std::vector<std::string>{},                                      \
      py::arg("constants") = std::map<std::string, long>{}, py::arg("negation") = "strict",                \
      py::arg("implication") = "strict", py::arg("pedantic") = false, py::arg("max_steps") = py::none(),   \
      py::arg("solution_limit") = py::none(), py::arg("internal") = false

py::dict solve(const std::string& source, const std::vector<std::string>& assignments,
               const std::map<std::string, long>& consts, const std::string& negation,
               const std::string& implication, bool pedantic, std::optional<std::uint64_t> max_steps,
               std::optional<std::uint64_t> solution_limit, bool internal) {
  fap::ProgramUnit unit = fap::parse(source, constants(consts));
  fap::Valuation alpha0 = fap::bind(unit, assignments);
  fap::SolveResult r;
  {
    py::gil_scoped_release release;
    r = fap::solve(unit, alpha0, config(negation, implication, pedantic, max_steps, solution_limit, internal));
  }
  py::list leaves;
  for (const auto& l : r.leaves) leaves.append(to_python(l));
  py::dict out;
  out["status"] = std::string(fap::to_string(r.status));
  out["leaves"] = leaves;
  out["steps"] = r.steps;
  return out;
}

std::string trace(const std::string& source, const std::string& format, std::size_t max_nodes,
                  const std::vector<std::string>& assignments, const std::map<std::string, long>& consts,
                  const std::string& negation, const std::string& implication, bool pedantic,
                  std::optional<std::uint64_t> max_steps, std::optional<std::uint64_t> solution_limit,
                  bool internal) {
  fap::RenderOptions ro;
  if (format == "text") {
    ro.format = fap::RenderOptions::Format::Text;
  } else if (format == "dot") {
    ro.format = fap::RenderOptions::Format::Dot;
  } else {
    throw py::value_error("format must be 'text' or 'dot'");
  }
  ro.max_nodes = max_nodes;
  fap::ProgramUnit unit = fap::parse(source, constants(consts));
  fap::Valuation alpha0 = fap::bind(unit, assignments);
  fap::Trace t = fap::trace(unit, alpha0, config(negation, implication, pedantic, max_steps, solution_limit, internal));
  return fap::render(t.root, ro);
}

}  // namespace

PYBIND11_MODULE(_fap, m) {
  m.doc() = "Execute first-order formulas over the integers as programs";

  static py::exception<fap::ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<fap::BindError> bind_error(m, "BindError", PyExc_ValueError);
  static py::exception<fap::OracleError> oracle_error(m, "OracleError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const fap::ParseError& e) {
      std::string msg = std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                        std::string(fap::to_string(e.kind())) + " error: " + e.message();
      PyErr_SetString(parse_error.ptr(), msg.c_str());
    } catch (const fap::BindError& e) {
      PyErr_SetString(bind_error.ptr(), e.what());
    } catch (const fap::OracleError& e) {
      PyErr_SetString(oracle_error.ptr(), e.what());
    }
  });

  m.def(
      "normalize",
      [](const std::string& source, const std::map<std::string, long>& consts) {
        return fap::to_string(fap::normalize(fap::parse(source, constants(consts))));
      },
      py::arg("source"), py::kw_only(), py::arg("constants") = std::map<std::string, long>{},
      "Parse, check and normalize a program; returns it in surface syntax.");

  m.def("solve", &solve, py::arg("source"), FAP_ENGINE_ARGS,
        "Run the query; returns {'status', 'leaves', 'steps'} with leaves in search order.");

  m.def("trace", &trace, py::arg("source"), py::kw_only(), py::arg("format") = "text",
        py::arg("max_nodes") = 10000, py::arg("assignments") = std::vector<std::string>{},
        py::arg("constants") = std::map<std::string, long>{}, py::arg("negation") = "strict",
        py::arg("implication") = "strict", py::arg("pedantic") = false, py::arg("max_steps") = py::none(),
        py::arg("solution_limit") = py::none(), py::arg("internal") = false,
        "Render the explored tree as indented text or Graphviz DOT.");

  m.def(
      "satisfiable",
      [](const std::string& source, const std::vector<std::string>& assignments, long lo, long hi) {
        fap::ProgramUnit unit = fap::parse(source);
        fap::Valuation alpha = fap::bind(unit, assignments);
        fap::Satisfiability s = fap::oracle_satisfiable(unit, unit.query, alpha, {lo, hi});
        py::list witnesses;
        for (const auto& w : s.witnesses) witnesses.append(to_python(w));
        return witnesses;
      },
      py::arg("source"), py::kw_only(), py::arg("assignments") = std::vector<std::string>{}, py::arg("lo") = 0,
      py::arg("hi") = 4, "Brute-force models of the query over [lo..hi], in enumeration order.");

  m.def(
      "generate",
      [](std::uint64_t seed, int depth) {
        fap::GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.max_depth = depth;
        return fap::to_string(fap::generate(cfg));
      },
      py::arg("seed"), py::arg("depth") = 5, "Random program, deterministic in the seed.");

  m.def(
      "squares",
      [](int nx, int ny, const std::vector<long>& sizes, const std::vector<std::string>& partial) {
        fap::SquaresCase c;
        c.nx = nx;
        c.ny = ny;
        for (long s : sizes) c.sizes.emplace_back(s);
        c.partial = partial;
        fap::SquaresReport r = fap::run_squares(c, {});
        py::list placements;
        for (const auto& p : r.placements) {
          py::dict d;
          d["square"] = p.square;
          d["x"] = to_python(fap::Value{p.x});
          d["y"] = to_python(fap::Value{p.y});
          d["size"] = to_python(fap::Value{p.size});
          placements.append(d);
        }
        py::dict out;
        out["status"] = std::string(fap::to_string(r.run.status));
        out["placements"] = placements;
        out["verified"] = r.verified;
        out["steps"] = r.run.steps;
        return out;
      },
      py::arg("nx"), py::arg("ny"), py::arg("sizes"), py::kw_only(),
      py::arg("partial") = std::vector<std::string>{},
      "Place squares of the given sizes in an nx by ny rectangle and check the result.");
}
