#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "rabc/syntax.hpp"

namespace rabc {

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << v.pos.line << ":" << v.pos.col << ": " << (v.function.empty() ? "" : v.function + ": ")
       << v.message << "\n";
  return os.str();
}

namespace {

bool has_shared_of_mut(const SimpleType& t) {
  if (!t.is_ref()) return false;
  if (t.kind == TypeKind::SharedRef && t.inner->kind == TypeKind::MutRef) return true;
  return has_shared_of_mut(*t.inner);
}

class FunctionChecker {
 public:
  FunctionChecker(const Program& prog, const Function& fn, ValidationReport& rep)
      : prog_(prog), fn_(fn), rep_(rep) {}

  void run() {
    std::set<std::string> seen;
    auto declare = [&](const Binding& b, const char* what) {
      if (b.name == kRetVar) report(fn_.pos, std::string(what) + " may not be named 'ret'");
      else if (!seen.insert(b.name).second)
        report(fn_.pos, "duplicate declaration of '" + b.name + "'");
      if (has_shared_of_mut(b.type))
        report(fn_.pos, "shared borrow of mutable borrow in the type of '" + b.name + "'");
    };
    for (const auto& b : fn_.params) declare(b, "parameter");
    for (const auto& b : fn_.locals) declare(b, "local");
    if (has_shared_of_mut(fn_.ret_type))
      report(fn_.pos, "shared borrow of mutable borrow in the return type");
    block(fn_.body, true);
  }

 private:
  const Program& prog_;
  const Function& fn_;
  ValidationReport& rep_;

  void report(SrcPos pos, std::string msg) { rep_.violations.push_back({fn_.name, pos, std::move(msg)}); }

  std::optional<SimpleType> place_type(const Place& p, SrcPos pos) {
    const SimpleType* root = fn_.lookup(p.root);
    if (!root) {
      report(pos, "undeclared variable '" + p.root + "'");
      return std::nullopt;
    }
    SimpleType t = *root;
    for (unsigned i = 0; i < p.derefs; ++i) {
      if (t.kind == TypeKind::BoxList) t = SimpleType::list();
      else if (t.is_ref()) t = *t.inner;
      else {
        report(pos, "cannot dereference '" + to_string(Place{p.root, i}) + "' of type " +
                        to_string(t));
        return std::nullopt;
      }
    }
    return t;
  }

  std::optional<SimpleType> expr_type(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Int: return SimpleType::i32();
      case ExprKind::True:
      case ExprKind::False: return SimpleType::boolean();
      case ExprKind::Nil: return SimpleType::list();
      case ExprKind::Box: {
        auto t = expr_type(e.kids[0]);
        if (!t) return std::nullopt;
        if (t->kind != TypeKind::List) {
          report(e.pos, "box expects a list, found " + to_string(*t));
          return std::nullopt;
        }
        return SimpleType::box_list();
      }
      case ExprKind::BinOp: {
        auto l = expr_type(e.kids[0]);
        auto r = expr_type(e.kids[1]);
        if (!l || !r) return std::nullopt;
        if (l->kind != TypeKind::I32 || r->kind != TypeKind::I32) {
          report(e.pos, std::string("operator ") + rabc::to_string(e.op) + " expects i32 operands");
          return std::nullopt;
        }
        return is_comparison(e.op) ? SimpleType::boolean() : SimpleType::i32();
      }
      case ExprKind::Copy: {
        auto t = place_type(e.place, e.pos);
        if (t && t->kind != TypeKind::I32 && t->kind != TypeKind::Bool) {
          report(e.pos, "copy of non-atomic place '" + to_string(e.place) + "' of type " +
                            to_string(*t));
          return std::nullopt;
        }
        return t;
      }
      case ExprKind::Move: return place_type(e.place, e.pos);
      case ExprKind::Shared:
      case ExprKind::Mut: {
        auto t = place_type(e.place, e.pos);
        if (!t) return std::nullopt;
        if (e.kind == ExprKind::Shared && t->kind == TypeKind::MutRef) {
          report(e.pos, "shared borrow of mutable borrow '" + to_string(e.place) + "'");
          return std::nullopt;
        }
        return e.kind == ExprKind::Shared ? SimpleType::shared(*t) : SimpleType::mut(*t);
      }
    }
    return std::nullopt;
  }

  void expect_type(const Expr& e, const SimpleType& want, const std::string& what) {
    auto t = expr_type(e);
    if (t && *t != want)
      report(e.pos, what + ": expected " + to_string(want) + ", found " + to_string(*t));
  }

  bool is_local(const std::string& n) const {
    return std::any_of(fn_.locals.begin(), fn_.locals.end(),
                       [&](const Binding& b) { return b.name == n; });
  }

  void block(const std::vector<Stmt>& body, bool top) {
    for (size_t i = 0; i < body.size(); ++i) {
      const Stmt& s = body[i];
      bool tail = top && i + 1 == body.size();
      stmt(s, tail);
    }
  }

  void stmt(const Stmt& s, bool tail) {
    switch (s.kind) {
      case StmtKind::Tick: break;
      case StmtKind::Return:
        if (!tail) report(s.pos, "return is only allowed as the last statement of a function body");
        break;
      case StmtKind::Drop: place_type(s.place, s.pos); break;
      case StmtKind::If: {
        auto t = place_type(s.place, s.pos);
        if (t && t->kind != TypeKind::Bool)
          report(s.pos, "if condition '" + to_string(s.place) + "' has type " + to_string(*t));
        block(s.first, false);
        block(s.second, false);
        break;
      }
      case StmtKind::Match: {
        auto t = place_type(s.place, s.pos);
        if (t && t->kind != TypeKind::List)
          report(s.pos, "match scrutinee '" + to_string(s.place) + "' has type " + to_string(*t));
        auto binder = [&](const std::string& n, const SimpleType& want) {
          const SimpleType* bt = fn_.lookup(n);
          if (!bt || !is_local(n)) report(s.pos, "match binder '" + n + "' is not a declared local");
          else if (*bt != want)
            report(s.pos, "match binder '" + n + "' must have type " + to_string(want) +
                              ", found " + to_string(*bt));
        };
        binder(s.hd, SimpleType::i32());
        binder(s.tl, SimpleType::box_list());
        if (s.hd == s.tl) report(s.pos, "match binders must be distinct");
        if (s.place.root == s.hd || s.place.root == s.tl)
          report(s.pos, "match binder aliases the scrutinee");
        block(s.first, false);
        block(s.second, false);
        break;
      }
      case StmtKind::Assign: {
        auto t = place_type(s.place, s.pos);
        if (t) expect_type(s.value, *t, "assignment to '" + to_string(s.place) + "'");
        else expr_type(s.value);
        break;
      }
      case StmtKind::AssignCons: {
        auto t = place_type(s.place, s.pos);
        if (t && t->kind != TypeKind::List)
          report(s.pos, "cons assigned to '" + to_string(s.place) + "' of type " + to_string(*t));
        expect_type(s.args[0], SimpleType::i32(), "cons head");
        expect_type(s.args[1], SimpleType::box_list(), "cons tail");
        break;
      }
      case StmtKind::AssignCall: {
        auto t = place_type(s.place, s.pos);
        const Function* callee = prog_.find(s.callee);
        if (!callee) {
          report(s.pos, "call to undefined function '" + s.callee + "'");
          for (const auto& a : s.args) expr_type(a);
          break;
        }
        if (callee->params.size() != s.args.size()) {
          report(s.pos, "'" + s.callee + "' expects " + std::to_string(callee->params.size()) +
                            " arguments, found " + std::to_string(s.args.size()));
          for (const auto& a : s.args) expr_type(a);
        } else {
          for (size_t i = 0; i < s.args.size(); ++i)
            expect_type(s.args[i], callee->params[i].type,
                        "argument " + std::to_string(i + 1) + " of '" + s.callee + "'");
        }
        if (t && *t != callee->ret_type)
          report(s.pos, "result of '" + s.callee + "' has type " + to_string(callee->ret_type) +
                            " but '" + to_string(s.place) + "' has type " + to_string(*t));
        break;
      }
    }
  }
};

}  // namespace

ValidationReport validate(const Program& p) {
  ValidationReport rep;
  std::set<std::string> names;
  for (const auto& f : p.functions) {
    if (!names.insert(f.name).second)
      rep.violations.push_back({f.name, f.pos, "duplicate function '" + f.name + "'"});
    FunctionChecker(p, f, rep).run();
  }
  return rep;
}

namespace {

void collect_callees(const std::vector<Stmt>& body, std::vector<std::string>& out) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::AssignCall) out.push_back(s.callee);
    collect_callees(s.first, out);
    collect_callees(s.second, out);
  }
}

}  // namespace

std::vector<std::vector<std::string>> call_graph_sccs(const Program& p) {
  const size_t n = p.functions.size();
  std::map<std::string, size_t> index_of;
  for (size_t i = 0; i < n; ++i) index_of.emplace(p.functions[i].name, i);
  std::vector<std::vector<size_t>> edges(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::string> callees;
    collect_callees(p.functions[i].body, callees);
    for (const auto& c : callees) {
      auto it = index_of.find(c);
      if (it != index_of.end()) edges[i].push_back(it->second);
    }
  }

  // Tarjan: components are completed callees-first.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<size_t> stack;
  int counter = 0;
  std::vector<std::vector<std::string>> out;
  std::function<void(size_t)> visit = [&](size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (size_t w : edges[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<size_t> comp;
      size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      std::vector<std::string> names;
      for (size_t i : comp) names.push_back(p.functions[i].name);
      out.push_back(std::move(names));
    }
  };
  for (size_t i = 0; i < n; ++i)
    if (index[i] < 0) visit(i);
  return out;
}

}  // namespace rabc
