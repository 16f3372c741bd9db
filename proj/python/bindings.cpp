#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rabc/harness.hpp"
#include "rabc/report.hpp"
#include "rabc/syntax.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Validation failures raise ValueError; parse errors raise its ParseError subclass.
rabc::Program load(const std::string& source) {
  rabc::Program p = rabc::parse(source);
  rabc::ValidationReport rep = rabc::validate(p);
  if (!rep.ok()) throw std::invalid_argument(rep.to_string());
  return p;
}

rabc::AnalysisResult solved(const rabc::Program& p, const rabc::AnalysisOptions& opts = {}) {
  rabc::AnalysisResult r = rabc::analyze_program(p, opts);
  if (!r.solved) throw rabc::TypingError(rabc::TypingError::Kind::Infeasible, r.error);
  return r;
}

std::string validate_json(const std::string& source) {
  json out{{"ok", true}, {"errors", json::array()}};
  try {
    rabc::ValidationReport rep = rabc::validate(rabc::parse(source));
    for (const auto& v : rep.violations)
      out["errors"].push_back({{"function", v.function}, {"line", v.pos.line}, {"col", v.pos.col},
                               {"message", v.message}});
  } catch (const rabc::ParseError& e) {
    out["errors"].push_back({{"function", ""}, {"line", e.pos.line}, {"col", e.pos.col}, {"message", e.what()}});
  }
  out["ok"] = out["errors"].empty();
  return out.dump();
}

std::string analyze_json(const std::string& source, bool current_only, const std::string& w_sig,
                         const std::string& w_int) {
  rabc::AnalysisOptions opts;
  opts.w_sig = rabc::parse_rational(w_sig);
  opts.w_int = rabc::parse_rational(w_int);
  rabc::AnalysisResult r = solved(load(source), opts);
  json j = rabc::analysis_json(r, current_only);
  j["assignment"] = rabc::assignment_json(r);
  return j.dump();
}

std::string run_json(const std::string& source, const std::string& fn_name, const std::vector<std::string>& args,
                     std::uint64_t fuel) {
  rabc::Program prog = load(source);
  const rabc::Function* fn = prog.find(fn_name);
  if (!fn) throw std::invalid_argument("no function '" + fn_name + "'");
  if (args.size() != fn->params.size())
    throw std::invalid_argument(fn_name + " expects " + std::to_string(fn->params.size()) + " arguments");
  std::vector<rabc::Value> base;
  for (size_t i = 0; i < args.size(); ++i) base.push_back(rabc::parse_value_literal(args[i], fn->params[i].type));
  rabc::ExecOptions opts;
  opts.fuel = fuel;
  rabc::Interpreter in(prog, opts);
  rabc::Value r = in.call(*fn, rabc::scaffold_args(in.store(), *fn, base));
  return json{{"ret", rabc::show_value(r, fn->ret_type)}, {"cost", in.cost()}}.dump();
}

std::string check_json(const std::string& source, std::size_t lo, std::size_t hi, const std::string& only) {
  rabc::Program prog = load(source);
  rabc::AnalysisResult r = solved(prog);
  json out = json::array();
  for (const auto& f : prog.functions)
    if (only.empty() || f.name == only) out.push_back(rabc::fit_json(rabc::measure_and_fit(prog, r, f.name, lo, hi, r.assignment)));
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_rabc, m) {
  m.doc() = "resource bound analysis for a borrow calculus";
  py::register_exception<rabc::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<rabc::TypingError>(m, "TypingError", PyExc_RuntimeError);
  py::register_exception<rabc::RuntimeError>(m, "EvalError", PyExc_RuntimeError);

  m.def("validate", &validate_json, py::arg("source"));
  m.def("analyze", &analyze_json, py::arg("source"), py::arg("current_only") = false, py::arg("w_sig") = "1024",
        py::arg("w_int") = "1/1024");
  m.def("run", &run_json, py::arg("source"), py::arg("fn"), py::arg("args"), py::arg("fuel") = 10'000'000);
  m.def("check", &check_json, py::arg("source"), py::arg("lo") = 0, py::arg("hi") = 50, py::arg("fn") = "");
}
