#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rabc/annotations.hpp"
#include "rabc/lp.hpp"
#include "rabc/syntax.hpp"

namespace rabc {

using Context = std::map<std::string, RType>;

// Type at a place: boxes yield their list, shared borrows their target,
// mutable borrows their current type.
RType ctx_read(const Context& g, const Place& p);
// Updates the type at a place. Writing through a mutable borrow requires the
// replaced current type to be well formed; those constraints are returned.
std::vector<Constraint> ctx_write(Annotator& an, Context& g, const Place& p, RType t);

struct Signature {
  std::string name;
  std::vector<std::pair<std::string, RType>> params;
  RType ret;
  VarId delta = 0;  // constant part of the bound (cost variable)
};

// Resolves a callee to the signature used at one call site.
using SignatureEnv = std::function<Signature(const std::string&)>;

class Typer {
 public:
  Typer(Annotator& an, SignatureEnv env) : an_(an), env_(std::move(env)) {}

  // Both update g in place and emit constraints into the annotator.
  RType type_expr(Context& g, const Expr& e);
  LinExpr type_block(Context& g, const std::vector<Stmt>& body);
  LinExpr type_stmt(Context& g, const Stmt& s);

  std::string function_name;  // used in provenance tags

 private:
  Annotator& an_;
  SignatureEnv env_;

  void set_site(SrcPos pos);
  void meet_into(Context& g, const Context& g1, const Context& g2);
};

struct FunctionAnalysis {
  Signature sig;
  Context entry;  // parameters, locals and ret before the body
  Context exit;   // after the body
  std::size_t group = 0;
};

struct GroupAnalysis {
  std::vector<std::string> functions;
  VarId var_begin = 0, var_end = 0;
  std::size_t cons_begin = 0, cons_end = 0;
  LpStatus status = LpStatus::Optimal;
  Rational objective = 0;
  std::size_t pivots = 0;
  std::vector<std::string> infeasible_core;  // provenance of a conflicting subset
};

struct AnalysisOptions {
  Rational w_sig = 1024;
  Rational w_int = Rational(1, 1024);
};

struct AnalysisResult {
  Annotator an;
  std::map<std::string, FunctionAnalysis> functions;
  std::vector<std::string> order;  // functions in program order
  std::vector<GroupAnalysis> groups;
  Assignment assignment;
  AnalysisOptions options;
  bool solved = false;
  std::string error;  // set when a group has no solution

  Rational value(VarId v) const;
  // The LP solved for one group, e.g. for dumping.
  LpProblem group_problem(std::size_t g) const;
};

// Groups are solved callees-first; calls into earlier groups use fresh
// copies of the callee's constraint system, calls within a group share one
// signature. Throws TypingError on ill-typed programs; an infeasible or
// unbounded group is reported through `solved` and `error`.
AnalysisResult analyze_program(const Program& p, const AnalysisOptions& opts = {});

}  // namespace rabc
