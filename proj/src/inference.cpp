#include "rabc/inference.hpp"

#include <set>

namespace rabc {

namespace {

LinExpr v(VarId x) { return LinExpr::var(x); }

[[noreturn]] void bot_read(const Place& p) {
  throw TypingError(TypingError::Kind::BotRead,
                    "'" + to_string(p) + "' is used after its value was moved or dropped");
}

// Box contents that were moved out carry no potential.
RType zero_list(Annotator& an, std::vector<Constraint>& cs, bool boxed) {
  VarId z = an.fresh(VarKind::Potential, "moved");
  cs.push_back(eq(v(z), 0, an.at("moved-out")));
  return boxed ? RType::box_list(z) : RType::list(z);
}

}  // namespace

RType ctx_read(const Context& g, const Place& p) {
  auto it = g.find(p.root);
  if (it == g.end())
    throw TypingError(TypingError::Kind::Shape, "unknown variable '" + p.root + "'");
  RType t = it->second;
  for (unsigned i = 0; i < p.derefs; ++i) {
    switch (t.kind()) {
      case RichKind::BoxList: t = RType::list(t.annot()); break;
      case RichKind::Shared: {
        RType in = t.inner();
        t = std::move(in);
        break;
      }
      case RichKind::Mut: {
        RType in = t.current();
        t = std::move(in);
        break;
      }
      case RichKind::Bot: bot_read(Place{p.root, i});
      default:
        throw TypingError(TypingError::Kind::Shape, "cannot dereference '" +
                                                        to_string(Place{p.root, i}) +
                                                        "' of type " + to_string(t));
    }
  }
  return t;
}

std::vector<Constraint> ctx_write(Annotator& an, Context& g, const Place& p, RType t) {
  std::vector<Constraint> cs;
  if (p.is_var()) {
    g[p.root] = std::move(t);
    return cs;
  }
  Place parent = p.parent();
  RType pt = ctx_read(g, parent);
  RType updated;
  switch (pt.kind()) {
    case RichKind::BoxList:
      if (t.kind() == RichKind::List) updated = RType::box_list(t.annot());
      else if (t.is_bot()) updated = zero_list(an, cs, true);
      else
        throw TypingError(TypingError::Kind::Shape,
                          "cannot store " + to_string(t) + " in box '" + to_string(parent) + "'");
      break;
    case RichKind::Shared: updated = RType::shared(std::move(t)); break;
    case RichKind::Mut:
      cs = wellformed(pt.current(), an.at("write-through-mutable"));
      updated = RType::mut(std::move(t), pt.prophecy());
      break;
    case RichKind::Bot: bot_read(parent);
    default:
      throw TypingError(TypingError::Kind::Shape, "cannot write through '" + to_string(parent) +
                                                      "' of type " + to_string(pt));
  }
  auto more = ctx_write(an, g, parent, std::move(updated));
  cs.insert(cs.end(), more.begin(), more.end());
  return cs;
}

void Typer::set_site(SrcPos pos) {
  an_.site = function_name + " " + std::to_string(pos.line) + ":" + std::to_string(pos.col);
}

RType Typer::type_expr(Context& g, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int: return RType::i32();
    case ExprKind::True:
    case ExprKind::False: return RType::boolean();
    case ExprKind::Nil: return RType::list(an_.fresh(VarKind::Potential, "nil"));
    case ExprKind::Box: {
      RType in = type_expr(g, e.kids[0]);
      if (in.kind() != RichKind::List)
        throw TypingError(TypingError::Kind::Shape, "box of " + to_string(in));
      return RType::box_list(in.annot());
    }
    case ExprKind::BinOp: {
      for (const auto& k : e.kids) {
        RType t = type_expr(g, k);
        if (t.kind() != RichKind::Int)
          throw TypingError(TypingError::Kind::Shape,
                            std::string("operand of ") + to_string(e.op) + " has type " + to_string(t));
      }
      return is_comparison(e.op) ? RType::boolean() : RType::i32();
    }
    case ExprKind::Copy: {
      RType t = ctx_read(g, e.place);
      if (t.kind() != RichKind::Int && t.kind() != RichKind::Bool) {
        if (t.is_bot()) bot_read(e.place);
        throw TypingError(TypingError::Kind::CopyOfNonAtom,
                          "copy of '" + to_string(e.place) + "' of type " + to_string(t));
      }
      return t;
    }
    case ExprKind::Move: {
      RType t = ctx_read(g, e.place);
      an_.emit(ctx_write(an_, g, e.place, RType::bot()));
      return t;
    }
    case ExprKind::Shared: {
      RType t = ctx_read(g, e.place);
      if (t.is_bot()) bot_read(e.place);
      Shared s = share(an_, t);
      an_.emit(s.constraints);
      an_.emit(ctx_write(an_, g, e.place, s.kept));
      return RType::shared(s.lent);
    }
    case ExprKind::Mut: {
      RType t = ctx_read(g, e.place);
      if (t.is_bot()) bot_read(e.place);
      RType pro = prophesy(an_, t);
      an_.emit(ctx_write(an_, g, e.place, pro));
      return RType::mut(t, pro);
    }
  }
  return {};
}

LinExpr Typer::type_block(Context& g, const std::vector<Stmt>& body) {
  LinExpr total;
  for (const auto& s : body) total += type_stmt(g, s);
  return total;
}

void Typer::meet_into(Context& g, const Context& g1, const Context& g2) {
  g.clear();
  for (const auto& [name, t1] : g1) {
    auto it = g2.find(name);
    if (it == g2.end()) {
      g[name] = t1;
      continue;
    }
    Merged m = meet(an_, t1, it->second);
    an_.emit(m.constraints);
    g[name] = std::move(m.type);
  }
  for (const auto& [name, t2] : g2)
    if (!g.count(name)) g[name] = t2;
}

LinExpr Typer::type_stmt(Context& g, const Stmt& s) {
  set_site(s.pos);
  switch (s.kind) {
    case StmtKind::Tick: return LinExpr(Rational(s.amount));
    case StmtKind::Return: return {};
    case StmtKind::Drop: {
      RType t = ctx_read(g, s.place);
      an_.emit(wellformed(t, an_.at("drop")));
      an_.emit(ctx_write(an_, g, s.place, RType::bot()));
      return {};
    }
    case StmtKind::Assign: {
      RType nt = type_expr(g, s.value);
      set_site(s.pos);
      RType old = ctx_read(g, s.place);
      an_.emit(wellformed(old, an_.at("overwrite")));
      an_.emit(ctx_write(an_, g, s.place, std::move(nt)));
      return {};
    }
    case StmtKind::AssignCons: {
      RType h = type_expr(g, s.args[0]);
      RType t = type_expr(g, s.args[1]);
      set_site(s.pos);
      if (h.kind() != RichKind::Int)
        throw TypingError(TypingError::Kind::Shape, "cons head has type " + to_string(h));
      if (t.kind() != RichKind::BoxList)
        throw TypingError(t.is_bot() ? TypingError::Kind::BotRead : TypingError::Kind::Shape,
                          "cons tail has type " + to_string(t));
      RType old = ctx_read(g, s.place);
      an_.emit(wellformed(old, an_.at("overwrite")));
      an_.emit(ctx_write(an_, g, s.place, RType::list(t.annot())));
      return v(t.annot());
    }
    case StmtKind::If: {
      RType c = ctx_read(g, s.place);
      if (c.kind() != RichKind::Bool)
        throw TypingError(TypingError::Kind::Shape, "if condition has type " + to_string(c));
      Context g1 = g, g2 = g;
      LinExpr d1 = type_block(g1, s.first);
      LinExpr d2 = type_block(g2, s.second);
      set_site(s.pos);
      LinExpr out;
      if (d1 == d2) {
        out = d1;
      } else {
        VarId d = an_.fresh(VarKind::Cost, "if");
        an_.emit(ge(v(d), d1, an_.at("if:then")));
        an_.emit(ge(v(d), d2, an_.at("if:else")));
        out = v(d);
      }
      meet_into(g, g1, g2);
      return out;
    }
    case StmtKind::Match: {
      RType t = ctx_read(g, s.place);
      if (t.is_bot()) bot_read(s.place);
      if (t.kind() != RichKind::List)
        throw TypingError(TypingError::Kind::Shape, "match on '" + to_string(s.place) +
                                                        "' of type " + to_string(t));
      VarId alpha = t.annot();
      Context g1 = g;
      LinExpr d1 = type_block(g1, s.first);

      set_site(s.pos);
      Context gb = g;
      an_.emit(ctx_write(an_, gb, s.place, RType::bot()));
      gb[s.hd] = RType::i32();
      gb[s.tl] = RType::box_list(alpha);
      LinExpr d2 = type_block(gb, s.second);
      set_site(s.pos);
      RType tl = gb[s.tl];
      VarId beta;
      if (tl.kind() == RichKind::BoxList) {
        beta = tl.annot();
      } else if (tl.is_bot()) {
        std::vector<Constraint> cs;
        beta = zero_list(an_, cs, false).annot();
        an_.emit(cs);
      } else {
        throw TypingError(TypingError::Kind::Shape,
                          "match binder '" + s.tl + "' ends with type " + to_string(tl));
      }
      gb[s.hd] = RType::bot();
      gb[s.tl] = RType::bot();
      an_.emit(ctx_write(an_, gb, s.place, RType::list(beta)));

      VarId d = an_.fresh(VarKind::Cost, "match");
      an_.emit(ge(v(d), d1, an_.at("match:nil")));
      an_.emit(ge(v(d), d2 - v(alpha) + v(beta), an_.at("match:cons")));
      meet_into(g, g1, gb);
      return v(d);
    }
    case StmtKind::AssignCall: {
      Signature sig = env_(s.callee);
      if (sig.params.size() != s.args.size())
        throw TypingError(TypingError::Kind::Shape, "arity mismatch calling '" + s.callee + "'");
      for (size_t i = 0; i < s.args.size(); ++i) {
        RType a = type_expr(g, s.args[i]);
        set_site(s.pos);
        an_.emit(equate(sig.params[i].second, a, an_.at("call " + s.callee + " arg")));
      }
      RType old = ctx_read(g, s.place);
      an_.emit(wellformed(old, an_.at("overwrite")));
      an_.emit(ctx_write(an_, g, s.place, sig.ret));
      return v(sig.delta);
    }
  }
  return {};
}

Rational AnalysisResult::value(VarId x) const {
  auto it = assignment.find(x);
  return it == assignment.end() ? Rational(0) : it->second;
}

namespace {

std::set<VarId> signature_vars(const Signature& s) {
  std::set<VarId> out;
  for (const auto& [_, t] : s.params)
    for (VarId x : t.annotations()) out.insert(x);
  for (VarId x : s.ret.annotations()) out.insert(x);
  return out;
}

Signature clone_group(Annotator& an, const GroupAnalysis& grp, const Signature& sig) {
  std::vector<VarId> fresh(grp.var_end - grp.var_begin);
  for (VarId x = grp.var_begin; x < grp.var_end; ++x)
    fresh[x - grp.var_begin] = an.fresh(an.info(x).kind, sig.name + "/" + an.info(x).tag);
  auto ren = [&](VarId x) {
    return (x >= grp.var_begin && x < grp.var_end) ? fresh[x - grp.var_begin] : x;
  };
  auto ren_expr = [&](const LinExpr& e) {
    LinExpr out(e.constant);
    for (const auto& [x, c] : e.terms) out += LinExpr::var(ren(x), c);
    return out;
  };
  for (size_t i = grp.cons_begin; i < grp.cons_end; ++i) {
    Constraint c = an.constraints()[i];
    an.emit({ren_expr(c.lhs), c.rel, ren_expr(c.rhs), sig.name + "/" + c.provenance});
  }
  Signature out;
  out.name = sig.name;
  for (const auto& [n, t] : sig.params) out.params.emplace_back(n, t.rename(ren));
  out.ret = sig.ret.rename(ren);
  out.delta = ren(sig.delta);
  return out;
}

}  // namespace

LpProblem AnalysisResult::group_problem(std::size_t g) const {
  const GroupAnalysis& grp = groups.at(g);
  LpProblem p;
  for (VarId x = grp.var_begin; x < grp.var_end; ++x)
    p.vars[x] = {an.info(x).kind, an.info(x).name()};
  for (size_t i = grp.cons_begin; i < grp.cons_end; ++i) p.constraints.push_back(an.constraints()[i]);
  std::set<VarId> sig;
  std::set<VarId> deltas;
  for (const auto& f : grp.functions) {
    const Signature& s = functions.at(f).sig;
    auto vs = signature_vars(s);
    sig.insert(vs.begin(), vs.end());
    deltas.insert(s.delta);
  }
  for (VarId x = grp.var_begin; x < grp.var_end; ++x) {
    if (sig.count(x)) p.objective += LinExpr::var(x, options.w_sig);
    else if (deltas.count(x)) p.objective += LinExpr::var(x, 1);
    else if (an.info(x).kind == VarKind::Potential) p.objective += LinExpr::var(x, options.w_int);
  }
  return p;
}

AnalysisResult analyze_program(const Program& prog, const AnalysisOptions& opts) {
  ValidationReport rep = validate(prog);
  if (!rep.ok()) throw std::invalid_argument("program is not valid:\n" + rep.to_string());

  AnalysisResult res;
  res.options = opts;
  for (const auto& f : prog.functions) res.order.push_back(f.name);
  Annotator& an = res.an;
  res.solved = true;

  for (const auto& names : call_graph_sccs(prog)) {
    GroupAnalysis grp;
    grp.functions = names;
    grp.var_begin = static_cast<VarId>(an.var_count());
    grp.cons_begin = an.constraint_count();
    const size_t gi = res.groups.size();

    for (const auto& name : names) {
      const Function& f = *prog.find(name);
      FunctionAnalysis fa;
      fa.group = gi;
      fa.sig.name = name;
      for (const auto& b : f.params) {
        RType t = enrich(an, b.type, name + ".param." + b.name);
        fa.sig.params.emplace_back(b.name, t);
        fa.entry[b.name] = t;
      }
      for (const auto& b : f.locals) fa.entry[b.name] = enrich(an, b.type, name + ".local." + b.name);
      fa.sig.ret = enrich(an, f.ret_type, name + ".ret");
      fa.entry[kRetVar] = fa.sig.ret;
      fa.sig.delta = an.fresh(VarKind::Cost, name + ".delta");
      res.functions[name] = std::move(fa);
    }

    SignatureEnv env = [&](const std::string& callee) -> Signature {
      const FunctionAnalysis& fa = res.functions.at(callee);
      if (fa.group == gi) return fa.sig;
      return clone_group(an, res.groups.at(fa.group), fa.sig);
    };

    for (const auto& name : names) {
      const Function& f = *prog.find(name);
      FunctionAnalysis& fa = res.functions.at(name);
      Typer typer(an, env);
      typer.function_name = name;
      Context g = fa.entry;
      LinExpr body;
      try {
        body = typer.type_block(g, f.body);
      } catch (const TypingError& e) {
        throw TypingError(e.kind, an.site + ": " + e.what());
      }
      an.site = name + " exit";
      for (const auto& [x, t] : g) an.emit(wellformed(t, an.at("exit " + x)));
      if (g[kRetVar].is_bot())
        throw TypingError(TypingError::Kind::Unassigned, name + ": ret is not assigned on every path");
      an.emit(equate(g[kRetVar], fa.sig.ret, an.at("exit ret")));
      an.emit(eq(body, v(fa.sig.delta), an.at("body cost")));
      fa.exit = std::move(g);
    }
    an.site.clear();

    grp.var_end = static_cast<VarId>(an.var_count());
    grp.cons_end = an.constraint_count();
    res.groups.push_back(grp);

    LpProblem lp = res.group_problem(gi);
    LpResult sol = solve(lp);
    GroupAnalysis& stored = res.groups.back();
    stored.status = sol.status;
    stored.pivots = sol.pivots;
    if (sol.status != LpStatus::Optimal) {
      res.solved = false;
      std::string who;
      for (const auto& n : names) who += (who.empty() ? "" : ", ") + n;
      res.error = std::string("no bound for {") + who + "}: LP is " + to_string(sol.status);
      for (size_t i : sol.infeasible_hint) stored.infeasible_core.push_back(lp.constraints[i].provenance);
      break;
    }
    stored.objective = sol.objective;
    for (auto& [x, q] : sol.assignment) res.assignment[x] = q;
  }
  return res;
}

}  // namespace rabc
