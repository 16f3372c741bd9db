#include "checks.hpp"

#include <functional>
#include <optional>
#include <random>

#include "rabc/harness.hpp"

using namespace rabc;

namespace checks {

namespace {

struct Rng {
  std::mt19937 gen;
  explicit Rng(unsigned seed) : gen(seed) {}
  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); }
  Rational small() {  // some negatives
    Rational q(below(41) - 10, 1 + below(3));
    q.canonicalize();
    return q;
  }
};

Value rand_list(Rng& r, int max_len = 6) {
  std::vector<std::int64_t> xs(static_cast<size_t>(r.below(max_len + 1)));
  for (auto& x : xs) x = r.below(100);
  return Value::list(xs);
}

RType rand_type(Annotator& an, Rng& r, bool allow_mut, int depth = 0) {
  switch (r.below(depth > 2 ? 3 : (allow_mut ? 5 : 4))) {
    case 0: return RType::list(an.fresh(VarKind::Potential, ""));
    case 1: return RType::box_list(an.fresh(VarKind::Potential, ""));
    case 2: return r.below(2) ? RType::i32() : RType::boolean();
    case 3: return RType::shared(rand_type(an, r, false, depth + 1));
    default: {
      RType c = rand_type(an, r, allow_mut, depth + 1);
      return RType::mut(c, prophesy(an, c));
    }
  }
}

Value rand_value(const RType& t, Rng& r) {
  switch (t.kind()) {
    case RichKind::List: return rand_list(r);
    case RichKind::BoxList: return Value::box(rand_list(r));
    case RichKind::Int: return Value::integer(r.below(10));
    case RichKind::Bool: return Value::boolean(r.below(2));
    case RichKind::Shared: return Value::borrow({0, Place::var("o")}, rand_value(t.inner(), r));
    case RichKind::Mut: return Value::borrow({0, Place::var("o")}, rand_value(t.current(), r));
    default: return Value::undef();
  }
}

RType copy_shape(Annotator& an, const RType& t) {
  return t.rename([&](VarId) { return an.fresh(VarKind::Potential, ""); });
}

Assignment rand_assignment(const Annotator& an, Rng& r) {
  Assignment a;
  for (VarId x = 0; x < an.var_count(); ++x) a[x] = r.small();
  return a;
}

bool holds_all(const std::vector<Constraint>& cs, const Assignment& a) {
  for (const auto& c : cs)
    if (!c.holds(a)) return false;
  return true;
}

// Sets the left-hand variable of each equation "x = expr" from expr.
void satisfy_equations(const std::vector<Constraint>& cs, Assignment& a) {
  for (const auto& c : cs)
    if (c.rel == Rel::Eq && c.lhs.terms.size() == 1 && c.lhs.constant == 0 && c.lhs.terms.begin()->second == 1)
      a[c.lhs.terms.begin()->first] = c.rhs.eval(a);
}

Signature no_calls(const std::string&) { throw std::logic_error("no calls"); }

// Root-frame slots with a matching context, built as a program would build
// them: borrows come from typing and evaluating & and &mut, so a lender
// holds the prophecy of its mutable borrow.
struct World {
  Annotator an;
  Program prog;
  Interpreter in{prog};
  Context ctx;
  std::vector<std::string> names;
  std::map<std::string, int> lent;  // 1 shared, 2 mutably

  Store& store() { return in.store(); }
  std::vector<std::string> unlent() {
    std::vector<std::string> out;
    for (const auto& y : names)
      if (lent[y] == 0) out.push_back(y);
    return out;
  }
};

void build_world(World& w, Rng& r) {
  Typer typer(w.an, no_calls);
  int n = 1 + r.below(5);
  for (int i = 0; i < n; ++i) {
    std::string name = "x" + std::to_string(i);
    int k = r.below(i == 0 ? 3 : 5);
    std::vector<std::string> shareable, lendable;
    for (const auto& y : w.names) {
      RichKind yk = w.ctx.at(y).kind();
      if (yk != RichKind::List && yk != RichKind::BoxList) continue;
      if (w.lent[y] != 2) shareable.push_back(y);
      if (w.lent[y] == 0) lendable.push_back(y);
    }
    if (k == 3 && shareable.empty()) k = 0;
    if (k == 4 && lendable.empty()) k = 1;
    if (k == 0) {
      w.store().set(0, name, rand_list(r));
      w.ctx[name] = RType::list(w.an.fresh(VarKind::Potential, ""));
    } else if (k == 1) {
      w.store().set(0, name, Value::box(rand_list(r)));
      w.ctx[name] = RType::box_list(w.an.fresh(VarKind::Potential, ""));
    } else if (k == 2) {
      w.store().set(0, name, Value::integer(r.below(9)));
      w.ctx[name] = RType::i32();
    } else {
      const auto& pool = k == 3 ? shareable : lendable;
      std::string target = pool[static_cast<size_t>(r.below(static_cast<int>(pool.size())))];
      Expr e = k == 3 ? Expr::shared(Place::var(target)) : Expr::mut(Place::var(target));
      w.ctx[name] = typer.type_expr(w.ctx, e);
      w.store().set(0, name, w.in.eval(0, e));
      w.lent[target] = k == 3 ? 1 : 2;
    }
    w.names.push_back(name);
  }
}

Assignment world_assignment(const Annotator& an, Rng& r) {
  Assignment a;
  for (VarId v = 0; v < an.var_count(); ++v) a[v] = Rational(r.below(7));
  satisfy_equations(an.constraints(), a);
  return a;
}

template <class T>
const T& pick(const std::vector<T>& xs, Rng& r) {
  return xs[static_cast<size_t>(r.below(static_cast<int>(xs.size())))];
}

}  // namespace

Stats potential_monotone(int cases, unsigned seed) {
  Rng r(seed);
  Stats s;
  for (long attempts = 0; s.cases < cases && attempts < 5'000'000; ++attempts) {
    Annotator an;
    RType t1 = rand_type(an, r, true);
    RType t2 = copy_shape(an, t1);
    std::vector<Constraint> cs = wellformed(t1, "");
    for (auto& c : wellformed(t2, "")) cs.push_back(c);
    for (auto& c : subtype(t1, t2, "")) cs.push_back(c);
    Assignment a = rand_assignment(an, r);
    if (!holds_all(cs, a)) continue;  // rejection sampling
    Value v = rand_value(t1, r);
    Rational p1 = potential(v, t1, a), p2 = potential(v, t2, a);
    if (p1 < 0 || p1 > p2) s.fail(to_string(t1) + " at " + to_string(v));
    ++s.cases;
  }
  return s;
}

Stats share_conserves(int cases, unsigned seed) {
  Rng r(seed);
  Stats s;
  while (s.cases < cases) {
    Annotator an;
    RType t = rand_type(an, r, false);
    Shared sh = share(an, t);
    Assignment a = rand_assignment(an, r);
    satisfy_equations(sh.constraints, a);
    if (!holds_all(sh.constraints, a)) {
      s.fail("unsatisfiable share of " + to_string(t));
      ++s.cases;
      continue;
    }
    Value v = rand_value(t, r);
    if (potential(v, t, a) != potential(v, sh.kept, a) + potential(v, sh.lent, a))
      s.fail(to_string(t) + " at " + to_string(v));
    ++s.cases;
  }
  return s;
}

Stats store_update(int cases, unsigned seed) {
  Rng r(seed);
  Stats s;
  for (long attempts = 0; s.cases < cases; ++attempts) {
    if (attempts == 100000) {
      s.fail("too few usable samples");
      break;
    }
    World w;
    build_world(w, r);
    // Only places that are not lent out are written; writes pass through
    // boxes and mutable borrows.
    const std::string x = pick(w.unlent(), r);
    Place p = Place::var(x);
    RType t = w.ctx.at(x);
    while (r.below(3) && (t.kind() == RichKind::BoxList || t.kind() == RichKind::Mut)) {
      p = p.deref();
      t = ctx_read(w.ctx, p);
    }
    if (t.kind() == RichKind::Shared || t.kind() == RichKind::Mut) continue;
    Value before = store_read(w.store(), 0, p);
    Value after = t.kind() == RichKind::List      ? rand_list(r)
                  : t.kind() == RichKind::BoxList ? Value::box(rand_list(r))
                                                  : Value::integer(r.below(9));
    Assignment a = world_assignment(w.an, r);
    Rational phi0 = potential_store(w.store(), 0, w.ctx, a);
    store_write(w.store(), 0, p, after);
    Rational phi1 = potential_store(w.store(), 0, w.ctx, a);
    if (phi1 - phi0 != potential(after, t, a) - potential(before, t, a)) s.fail("write at " + to_string(p));
    ++s.cases;
  }
  return s;
}

Stats context_update(int cases, unsigned seed) {
  Rng r(seed);
  Stats s;
  for (long attempts = 0; s.cases < cases; ++attempts) {
    if (attempts == 100000) {
      s.fail("too few usable samples");
      break;
    }
    World w;
    build_world(w, r);
    const std::string& x = pick(w.names, r);
    Place p = Place::var(x);
    RType t = w.ctx.at(x);
    while (r.below(3) &&
           (t.kind() == RichKind::BoxList || t.kind() == RichKind::Mut || t.kind() == RichKind::Shared)) {
      p = p.deref();
      t = ctx_read(w.ctx, p);
    }
    if (t.kind() != RichKind::List && t.kind() != RichKind::BoxList) continue;
    RType t2 = copy_shape(w.an, t);
    Value v = store_read(w.store(), 0, p);
    Context g = w.ctx;
    ctx_write(w.an, g, p, t2);
    Assignment a = world_assignment(w.an, r);
    if (potential_store(w.store(), 0, g, a) - potential_store(w.store(), 0, w.ctx, a) !=
        potential(v, t2, a) - potential(v, t, a))
      s.fail("retype at " + to_string(p));
    ++s.cases;
  }
  return s;
}

Stats expression_potential(int cases, unsigned seed) {
  Rng r(seed);
  Stats s;
  for (long attempts = 0; s.cases < cases; ++attempts) {
    if (attempts == 100000) {
      s.fail("too few usable samples");
      break;
    }
    World w;
    build_world(w, r);
    const std::string x = pick(w.unlent(), r);
    const RType t0 = w.ctx.at(x);
    Place p = Place::var(x);
    if ((t0.kind() == RichKind::BoxList || t0.kind() == RichKind::Shared || t0.kind() == RichKind::Mut) &&
        r.below(2))
      p = p.deref();
    RType at_p = ctx_read(w.ctx, p);
    bool under_shared = !p.is_var() && t0.kind() == RichKind::Shared;
    Expr e;
    switch (r.below(6)) {
      case 0:
        if (under_shared) continue;  // no moving out of a shared borrow
        e = Expr::move(p);
        break;
      case 1:
        if (at_p.contains_mut()) continue;
        e = Expr::shared(p);
        break;
      case 2:
        if (under_shared || at_p.is_atom()) continue;
        e = Expr::mut(p);
        break;
      case 3: e = Expr::nil(); break;
      case 4: e = Expr::box(Expr::nil()); break;
      default:
        if (!at_p.is_atom()) continue;
        e = Expr::copy(p);
        break;
    }
    Typer typer(w.an, no_calls);
    Context g = w.ctx;
    RType rt = typer.type_expr(g, e);
    Value v = w.in.eval(0, e);
    Assignment a = world_assignment(w.an, r);
    if (potential_store(w.store(), 0, g, a) - potential_store(w.store(), 0, w.ctx, a) != -potential(v, rt, a))
      s.fail("expression " + print(e));
    ++s.cases;
  }
  return s;
}

namespace {

std::optional<std::vector<Rational>> gauss(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs) {
  size_t n = rows.size();
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && rows[piv][c] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(rows[piv], rows[c]);
    std::swap(rhs[piv], rhs[c]);
    for (size_t r = 0; r < n; ++r) {
      if (r == c || rows[r][c] == 0) continue;
      Rational f = rows[r][c] / rows[c][c];
      for (size_t k = 0; k < n; ++k) rows[r][k] -= f * rows[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<Rational> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = rhs[i] / rows[i][i];
  return x;
}

// Minimum of the objective over all feasible vertices; nullopt if none.
// Variables are 0..n-1 and the region must be bounded.
std::optional<Rational> vertex_min(const LpProblem& p, size_t n) {
  std::vector<std::vector<Rational>> planes;
  std::vector<Rational> bs;
  for (const auto& c : p.constraints) {
    LinExpr d = c.lhs - c.rhs;
    std::vector<Rational> row(n);
    for (const auto& [x, k] : d.terms) row[x] = k;
    planes.push_back(row);
    bs.push_back(-d.constant);
  }
  for (size_t x = 0; x < n; ++x)
    if (p.vars.at(static_cast<VarId>(x)).kind == VarKind::Potential) {
      std::vector<Rational> row(n);
      row[x] = 1;
      planes.push_back(row);
      bs.push_back(0);
    }
  std::optional<Rational> best;
  std::vector<size_t> idx(n);
  std::function<void(size_t, size_t)> choose = [&](size_t start, size_t depth) {
    if (depth == n) {
      std::vector<std::vector<Rational>> rows;
      std::vector<Rational> rhs;
      for (size_t i : idx) {
        rows.push_back(planes[i]);
        rhs.push_back(bs[i]);
      }
      auto sol = gauss(rows, rhs);
      if (!sol) return;
      Assignment a;
      for (size_t x = 0; x < n; ++x) a[static_cast<VarId>(x)] = (*sol)[x];
      if (!holds_all(p.constraints, a)) return;
      for (const auto& [x, var] : p.vars)
        if (var.kind == VarKind::Potential && a[x] < 0) return;
      Rational val = p.objective.eval(a);
      if (!best || val < *best) best = val;
      return;
    }
    for (size_t i = start; i < planes.size(); ++i) {
      idx[depth] = i;
      choose(i + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

}  // namespace

Stats lp_matches_vertices(int cases, unsigned seed, int* infeasible) {
  Rng r(seed);
  auto coef = [&](int lo, int hi) { return lo + r.below(hi - lo + 1); };
  auto v = [](size_t x, Rational k = 1) { return LinExpr::var(static_cast<VarId>(x), std::move(k)); };
  Stats s;
  int none = 0;
  for (; s.cases < cases; ++s.cases) {
    size_t n = static_cast<size_t>(coef(1, 3));
    LpProblem p;
    for (size_t x = 0; x < n; ++x)
      p.vars[static_cast<VarId>(x)] = {coef(0, 2) ? VarKind::Potential : VarKind::Cost, ""};
    // Box every variable so the region is a polytope.
    for (size_t x = 0; x < n; ++x) {
      p.constraints.push_back(le(v(x), 10));
      if (p.vars[static_cast<VarId>(x)].kind == VarKind::Cost) p.constraints.push_back(ge(v(x), -10));
    }
    size_t m = static_cast<size_t>(coef(1, 6));
    for (size_t i = 0; i < m; ++i) {
      LinExpr lhs;
      for (size_t x = 0; x < n; ++x) lhs += v(x, coef(-3, 3));
      Rational rhs = coef(-6, 6);
      p.constraints.push_back(coef(0, 4) == 0 ? eq(lhs, rhs) : le(lhs, rhs));
    }
    for (size_t x = 0; x < n; ++x) p.objective += v(x, coef(-3, 3));

    LpResult res = solve(p);
    std::optional<Rational> oracle = vertex_min(p, n);
    std::string tag = "case " + std::to_string(s.cases);
    if (!oracle) {
      ++none;
      if (res.status != LpStatus::Infeasible) s.fail(tag + ": solver found a solution, oracle none");
      continue;
    }
    if (res.status != LpStatus::Optimal) {
      s.fail(tag + ": solver reports " + to_string(res.status));
      continue;
    }
    if (res.objective != *oracle || p.objective.eval(res.assignment) != *oracle)
      s.fail(tag + ": objective " + to_string(res.objective) + " vs " + to_string(*oracle));
    if (!holds_all(p.constraints, res.assignment)) s.fail(tag + ": assignment violates a constraint");
    for (const auto& [x, var] : p.vars)
      if (var.kind == VarKind::Potential && res.assignment.at(x) < 0) s.fail(tag + ": negative potential");
    if (solve(p).assignment != res.assignment) s.fail(tag + ": nondeterministic");
  }
  if (infeasible) *infeasible = none;
  return s;
}

}  // namespace checks
