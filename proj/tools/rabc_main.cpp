#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rabc/harness.hpp"
#include "rabc/inference.hpp"
#include "rabc/report.hpp"
#include "rabc/syntax.hpp"

namespace {

enum Exit { kOk = 0, kParse = 1, kTyping = 2, kRuntime = 3, kInternal = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and validates; returns false after printing diagnostics.
bool load(const std::string& path, rabc::Program& out) {
  std::string src = read_file(path);
  try {
    out = rabc::parse(src);
  } catch (const rabc::ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return false;
  }
  rabc::ValidationReport rep = rabc::validate(out);
  if (!rep.ok()) {
    std::cerr << rep.to_string();
    return false;
  }
  return true;
}

rabc::Rational parse_weight(const std::string& s) { return rabc::parse_rational(s); }

std::string lp_path(const std::string& base, size_t group, size_t groups) {
  if (groups == 1) return base;
  std::string stem = base;
  if (stem.size() > 3 && stem.substr(stem.size() - 3) == ".lp") stem.resize(stem.size() - 3);
  return stem + "." + std::to_string(group) + ".lp";
}

struct AnalyzeArgs {
  std::string file, dump_lp, w_sig = "1024", w_int = "1/1024";
  bool json = false, current_only = false, explain = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
  rabc::Program prog;
  if (!load(a.file, prog)) return kParse;
  rabc::AnalysisOptions opts;
  opts.w_sig = parse_weight(a.w_sig);
  opts.w_int = parse_weight(a.w_int);
  rabc::AnalysisResult res = rabc::analyze_program(prog, opts);

  if (!a.dump_lp.empty()) {
    for (size_t g = 0; g < res.groups.size(); ++g) {
      std::ofstream out(lp_path(a.dump_lp, g, res.groups.size()));
      rabc::dump_cplex_lp(res.group_problem(g), out);
    }
  }
  if (a.json) {
    nlohmann::json j = rabc::analysis_json(res, a.current_only);
    j["assignment"] = rabc::assignment_json(res);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << prog.functions.size() << " function" << (prog.functions.size() == 1 ? "" : "s") << "\n";
    if (res.solved)
      for (const auto& f : prog.functions) std::cout << rabc::signature_line(res, f.name, a.current_only) << "\n";
    if (a.explain) {
      for (size_t g = 0; g < res.groups.size(); ++g) {
        const auto& grp = res.groups[g];
        std::cout << "\ngroup " << g << " {";
        for (size_t i = 0; i < grp.functions.size(); ++i) std::cout << (i ? ", " : "") << grp.functions[i];
        std::cout << "}: " << (grp.cons_end - grp.cons_begin) << " constraints\n";
        std::map<rabc::VarId, std::string> names;
        for (rabc::VarId x = grp.var_begin; x < grp.var_end; ++x) names[x] = res.an.info(x).name();
        for (size_t i = grp.cons_begin; i < grp.cons_end; ++i) {
          const auto& c = res.an.constraints()[i];
          std::cout << "  " << rabc::to_string(c, &names) << "    [" << c.provenance << "]\n";
        }
      }
    }
  }
  if (!res.solved) {
    std::cerr << res.error << "\n";
    for (const auto& g : res.groups)
      for (const auto& p : g.infeasible_core) std::cerr << "  conflicting: " << p << "\n";
    return kTyping;
  }
  return kOk;
}

struct RunArgs {
  std::string file, fn;
  std::vector<std::string> args;
  std::uint64_t fuel = 10'000'000;
  bool trace = false;
};

int cmd_run(const RunArgs& a) {
  rabc::Program prog;
  if (!load(a.file, prog)) return kParse;
  const rabc::Function* fn = prog.find(a.fn);
  if (!fn) {
    std::cerr << "no function '" << a.fn << "'\n";
    return kParse;
  }
  if (a.args.size() != fn->params.size()) {
    std::cerr << a.fn << " expects " << fn->params.size() << " arguments, got " << a.args.size() << "\n";
    return kParse;
  }
  std::vector<rabc::Value> base;
  for (size_t i = 0; i < a.args.size(); ++i)
    base.push_back(rabc::parse_value_literal(a.args[i], fn->params[i].type));

  rabc::ExecOptions opts;
  opts.fuel = a.fuel;
  if (a.trace)
    opts.trace = [](const rabc::TraceEvent& e) {
      std::cout << std::string(2 * e.depth, ' ') << e.function->name << " " << e.stmt->pos.line << ":"
                << e.stmt->pos.col << " cost=" << e.cost << "\n";
    };
  rabc::Interpreter in(prog, opts);
  std::vector<rabc::Value> args = rabc::scaffold_args(in.store(), *fn, base);
  rabc::Value r = in.call(*fn, args);
  std::cout << "ret = " << rabc::show_value(r, fn->ret_type) << "\n";
  for (size_t i = 0; i < fn->params.size(); ++i)
    if (fn->params[i].type.kind == rabc::TypeKind::MutRef) {
      std::string slot = "__own_" + fn->params[i].name;
      const rabc::SimpleType* t = fn->params[i].type.inner.get();
      while (t->is_ref()) {
        slot += "_";
        t = t->inner.get();
      }
      std::cout << fn->params[i].name << " -> " << rabc::to_string(in.store().get(rabc::Store::kRoot, slot))
                << "\n";
    }
  std::cout << "cost = " << in.cost() << "\n";
  return kOk;
}

struct CheckArgs {
  std::string file, sizes = "0..50", assignment, only;
  bool json = false;
};

int cmd_check(const CheckArgs& a) {
  rabc::Program prog;
  if (!load(a.file, prog)) return kParse;
  size_t lo = 0, hi = 0;
  auto dots = a.sizes.find("..");
  if (dots == std::string::npos) lo = hi = std::stoul(a.sizes);
  else {
    lo = std::stoul(a.sizes.substr(0, dots));
    hi = std::stoul(a.sizes.substr(dots + 2));
  }
  rabc::AnalysisResult res = rabc::analyze_program(prog);
  if (!res.solved) {
    std::cerr << res.error << "\n";
    return kTyping;
  }
  rabc::Assignment asg = res.assignment;
  if (!a.assignment.empty()) asg = rabc::load_assignment(nlohmann::json::parse(read_file(a.assignment)), res);

  nlohmann::json reports = nlohmann::json::array();
  bool all_sound = true;
  if (!a.json)
    std::cout << prog.functions.size() << " function" << (prog.functions.size() == 1 ? "" : "s") << "\n";
  for (const auto& f : prog.functions) {
    if (!a.only.empty() && f.name != a.only) continue;
    rabc::FitReport r = rabc::measure_and_fit(prog, res, f.name, lo, hi, asg);
    all_sound = all_sound && r.sound;
    if (a.json) {
      reports.push_back(rabc::fit_json(r));
    } else {
      std::cout << f.name << ": bound " << rabc::to_string(r.constant) << " + " << rabc::to_string(r.coeff)
                << "*n, sizes " << lo << ".." << hi << ", slack_max " << rabc::to_string(r.slack_max) << ", "
                << (r.sound ? "sound" : "VIOLATED") << (r.tight ? ", tight" : "") << "\n";
    }
  }
  if (a.json) std::cout << reports.dump(2) << "\n";
  return all_sound ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rabc: resource bounds for a borrow calculus"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "infer resource signatures");
  analyze->add_option("file", aa.file)->required();
  analyze->add_flag("--json", aa.json, "JSON output");
  analyze->add_option("--dump-lp", aa.dump_lp, "write the LP of each group in CPLEX LP format");
  analyze->add_flag("--current-only", aa.current_only, "show only the current type of mutable borrows");
  analyze->add_flag("--explain", aa.explain, "list every constraint with its origin");
  analyze->add_option("--w-sig", aa.w_sig, "objective weight of signature annotations");
  analyze->add_option("--w-int", aa.w_int, "objective weight of internal annotations");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "execute a function and report its cost");
  run->add_option("file", ra.file)->required();
  run->add_option("--fn", ra.fn)->required();
  run->add_option("--args", ra.args, "argument literals, e.g. [1,2,3] 5 true")
      ->expected(1, 1000)
      ->allow_extra_args(false);
  run->add_option("--fuel", ra.fuel);
  run->add_flag("--trace", ra.trace);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "compare inferred bounds with measured costs");
  check->add_option("file", ca.file)->required();
  check->add_option("--sizes", ca.sizes, "input sizes A..B");
  check->add_flag("--json", ca.json);
  check->add_option("--assignment", ca.assignment, "JSON file with annotation values to use instead");
  check->add_option("--fn", ca.only, "only this function");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParse;  // --help exits 0, usage errors 1
  }
  try {
    if (*analyze) return cmd_analyze(aa);
    if (*run) return cmd_run(ra);
    if (*check) return cmd_check(ca);
  } catch (const rabc::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kParse;
  } catch (const rabc::TypingError& e) {
    std::cerr << "type error (" << rabc::to_string(e.kind) << "): " << e.what() << "\n";
    return kTyping;
  } catch (const rabc::RuntimeError& e) {
    std::cerr << "runtime error (" << rabc::to_string(e.kind) << "): " << e.what() << "\n";
    return kRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
