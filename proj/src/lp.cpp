#include "rabc/lp.hpp"

#include <algorithm>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace rabc {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

// Accepts "p", "p/q" and decimals such as "-2.5".
Rational parse_rational(const std::string& s) {
  Rational q;
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string frac = s.substr(dot + 1);
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("not a rational: '" + s + "'");
    std::string digits = s.substr(0, dot) + frac;
    if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument("not a rational: '" + s + "'");
    if (digits[0] == '+') digits.erase(0, 1);
    Rational num;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("not a rational: '" + s + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    q = num / Rational(den);
  } else if (q.set_str(s, 10) != 0) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
  q.canonicalize();
  return q;
}

LinExpr LinExpr::var(VarId v, Rational coeff) {
  LinExpr e;
  if (coeff != 0) e.terms.emplace(v, std::move(coeff));
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [v, c] : o.terms) {
    auto [it, fresh] = terms.emplace(v, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  LinExpr neg = o;
  neg *= -1;
  return *this += neg;
}

LinExpr& LinExpr::operator*=(const Rational& k) {
  if (k == 0) {
    terms.clear();
    constant = 0;
    return *this;
  }
  for (auto& [v, c] : terms) c *= k;
  constant *= k;
  return *this;
}

Rational LinExpr::eval(const Assignment& a) const {
  Rational out = constant;
  for (const auto& [v, c] : terms) {
    auto it = a.find(v);
    if (it != a.end()) out += c * it->second;
  }
  return out;
}

bool Constraint::holds(const Assignment& a) const {
  Rational l = lhs.eval(a), r = rhs.eval(a);
  return rel == Rel::Eq ? l == r : l <= r;
}

Constraint le(LinExpr a, LinExpr b, std::string prov) {
  return {std::move(a), Rel::Le, std::move(b), std::move(prov)};
}
Constraint ge(LinExpr a, LinExpr b, std::string prov) {
  return {std::move(b), Rel::Le, std::move(a), std::move(prov)};
}
Constraint eq(LinExpr a, LinExpr b, std::string prov) {
  return {std::move(a), Rel::Eq, std::move(b), std::move(prov)};
}

std::string to_string(const LinExpr& e, const std::map<VarId, std::string>* names) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : e.terms) {
    std::string name = "v" + std::to_string(v);
    if (names) {
      auto it = names->find(v);
      if (it != names->end()) name = it->second;
    }
    Rational mag = abs(c);
    if (first) os << (c < 0 ? "-" : "");
    else os << (c < 0 ? " - " : " + ");
    if (mag != 1) os << to_string(mag) << "*";
    os << name;
    first = false;
  }
  if (first) os << to_string(e.constant);
  else if (e.constant != 0)
    os << (e.constant < 0 ? " - " : " + ") << to_string(Rational(abs(e.constant)));
  return os.str();
}

std::string to_string(const Constraint& c, const std::map<VarId, std::string>* names) {
  return to_string(c.lhs, names) + (c.rel == Rel::Eq ? " = " : " <= ") + to_string(c.rhs, names);
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

using Entry = std::pair<size_t, Rational>;
using SparseRow = std::vector<Entry>;  // sorted by column

const Rational* find_entry(const SparseRow& row, size_t col) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const Entry& e, size_t c) { return e.first < c; });
  if (it == row.end() || it->first != col) return nullptr;
  return &it->second;
}

// row += k * other
void axpy(SparseRow& row, const Rational& k, const SparseRow& other) {
  SparseRow out;
  out.reserve(row.size() + other.size());
  size_t i = 0, j = 0;
  while (i < row.size() || j < other.size()) {
    if (j == other.size() || (i < row.size() && row[i].first < other[j].first)) {
      out.push_back(std::move(row[i++]));
    } else if (i == row.size() || other[j].first < row[i].first) {
      out.emplace_back(other[j].first, k * other[j].second);
      ++j;
    } else {
      Rational v = row[i].second + k * other[j].second;
      if (v != 0) out.emplace_back(row[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  row = std::move(out);
}

struct Tableau {
  std::vector<SparseRow> rows;
  std::vector<Rational> rhs;
  std::vector<size_t> basis;     // column basic in each row
  std::vector<Rational> reduced;  // dense reduced costs
  Rational value = 0;             // current objective value
  std::vector<bool> blocked;      // columns not allowed to enter
  size_t pivots = 0;

  void pivot(size_t r, size_t c) {
    ++pivots;
    Rational inv = 1 / *find_entry(rows[r], c);
    for (auto& e : rows[r]) e.second *= inv;
    rhs[r] *= inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const Rational* a = find_entry(rows[i], c);
      if (!a) continue;
      Rational k = -*a;
      axpy(rows[i], k, rows[r]);
      rhs[i] += k * rhs[r];
    }
    if (reduced[c] != 0) {
      Rational k = -reduced[c];
      value -= k * rhs[r];
      for (const auto& [col, v] : rows[r]) reduced[col] += k * v;
    }
    basis[r] = c;
  }

  void price(const std::vector<Rational>& costs) {
    reduced = costs;
    value = 0;
    for (size_t r = 0; r < rows.size(); ++r) {
      const Rational& cb = costs[basis[r]];
      if (cb == 0) continue;
      value += cb * rhs[r];
      for (const auto& [col, v] : rows[r]) reduced[col] -= cb * v;
    }
  }

  // Returns false when the objective is unbounded below.
  bool optimize() {
    for (;;) {
      std::optional<size_t> enter;
      for (size_t c = 0; c < reduced.size(); ++c)
        if (!blocked[c] && reduced[c] < 0) {
          enter = c;
          break;
        }
      if (!enter) return true;
      std::optional<size_t> leave;
      Rational best;
      for (size_t r = 0; r < rows.size(); ++r) {
        const Rational* a = find_entry(rows[r], *enter);
        if (!a || *a <= 0) continue;
        Rational ratio = rhs[r] / *a;
        if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }
};

}  // namespace

LpResult solve(const LpProblem& p) {
  LpResult res;
  // Column layout: potential var -> one column; cost var -> plus and minus columns.
  std::map<VarId, std::pair<size_t, std::optional<size_t>>> cols;
  size_t ncols = 0;
  for (const auto& [id, v] : p.vars) {
    if (v.kind == VarKind::Potential) cols[id] = {ncols++, std::nullopt};
    else {
      cols[id] = {ncols, ncols + 1};
      ncols += 2;
    }
  }
  auto column_terms = [&](const LinExpr& e) {
    std::vector<Entry> out;
    for (const auto& [v, c] : e.terms) {
      auto it = cols.find(v);
      if (it == cols.end())
        throw std::logic_error("LP uses undeclared variable v" + std::to_string(v));
      out.emplace_back(it->second.first, c);
      if (it->second.second) out.emplace_back(*it->second.second, -c);
    }
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    return out;
  };

  Tableau t;
  std::vector<size_t> row_constraint;  // tableau row -> constraint index
  std::vector<size_t> row_unit_col;    // initial identity column of each row
  std::vector<bool> is_artificial;
  struct PendingRow {
    SparseRow row;
    Rational rhs;
    bool slack;  // <= row: slack column with +1 before sign normalisation
    size_t cons;
  };
  std::vector<PendingRow> pending;
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    const Constraint& c = p.constraints[i];
    LinExpr d = c.lhs - c.rhs;
    Rational b = -d.constant;
    d.constant = 0;
    if (d.is_constant()) {
      bool ok = c.rel == Rel::Eq ? b == 0 : b >= 0;
      if (!ok) {
        res.status = LpStatus::Infeasible;
        res.infeasible_hint = {i};
        return res;
      }
      continue;
    }
    pending.push_back({column_terms(d), b, c.rel == Rel::Le, i});
  }
  const size_t nstruct = ncols;
  is_artificial.assign(nstruct, false);
  for (auto& pr : pending) {
    size_t slack_col = 0;
    bool has_slack = pr.slack;
    if (has_slack) {
      slack_col = ncols++;
      is_artificial.push_back(false);
      pr.row.emplace_back(slack_col, 1);
    }
    if (pr.rhs < 0) {
      for (auto& e : pr.row) e.second = -e.second;
      pr.rhs = -pr.rhs;
    }
    size_t unit;
    if (has_slack && *find_entry(pr.row, slack_col) > 0) {
      unit = slack_col;
    } else {
      unit = ncols++;
      is_artificial.push_back(true);
      pr.row.emplace_back(unit, 1);
    }
    t.rows.push_back(std::move(pr.row));
    t.rhs.push_back(pr.rhs);
    t.basis.push_back(unit);
    row_constraint.push_back(pr.cons);
    row_unit_col.push_back(unit);
  }
  t.blocked.assign(ncols, false);

  // Phase 1: minimise the sum of artificial variables.
  std::vector<Rational> phase1(ncols, 0);
  bool any_artificial = false;
  for (size_t c = 0; c < ncols; ++c)
    if (is_artificial[c]) {
      phase1[c] = 1;
      any_artificial = true;
    }
  if (any_artificial) {
    t.price(phase1);
    t.optimize();
    if (t.value > 0) {
      res.status = LpStatus::Infeasible;
      for (size_t r = 0; r < t.rows.size(); ++r) {
        Rational y = phase1[row_unit_col[r]] - t.reduced[row_unit_col[r]];
        if (y != 0) res.infeasible_hint.push_back(row_constraint[r]);
      }
      res.pivots = t.pivots;
      return res;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (size_t r = 0; r < t.rows.size();) {
      if (!is_artificial[t.basis[r]]) {
        ++r;
        continue;
      }
      std::optional<size_t> col;
      for (const auto& [c, v] : t.rows[r])
        if (!is_artificial[c]) {
          col = c;
          break;
        }
      if (col) {
        t.pivot(r, *col);
        ++r;
      } else {
        t.rows.erase(t.rows.begin() + r);
        t.rhs.erase(t.rhs.begin() + r);
        t.basis.erase(t.basis.begin() + r);
        row_constraint.erase(row_constraint.begin() + r);
        row_unit_col.erase(row_unit_col.begin() + r);
      }
    }
    for (size_t c = 0; c < ncols; ++c)
      if (is_artificial[c]) t.blocked[c] = true;
  }

  // Phase 2.
  std::vector<Rational> costs(ncols, 0);
  for (const auto& [v, c] : p.objective.terms) {
    auto it = cols.find(v);
    if (it == cols.end())
      throw std::logic_error("objective uses undeclared variable v" + std::to_string(v));
    costs[it->second.first] += c;
    if (it->second.second) costs[*it->second.second] -= c;
  }
  t.price(costs);
  if (!t.optimize()) {
    res.status = LpStatus::Unbounded;
    res.pivots = t.pivots;
    return res;
  }

  std::vector<Rational> x(ncols, 0);
  for (size_t r = 0; r < t.rows.size(); ++r) x[t.basis[r]] = t.rhs[r];
  for (const auto& [id, c] : cols) {
    Rational v = x[c.first];
    if (c.second) v -= x[*c.second];
    res.assignment[id] = v;
  }
  res.objective = p.objective.eval(res.assignment);
  res.status = LpStatus::Optimal;
  res.pivots = t.pivots;
  for (const auto& c : p.constraints)
    if (!c.holds(res.assignment))
      throw std::logic_error("simplex produced an assignment violating " + to_string(c));
  return res;
}

namespace {

std::string lp_number(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  mpz_class den = q.get_den();
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) den /= 2;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) den /= 5;
  std::ostringstream os;
  if (den == 1) {
    // Terminating decimal: scale by 10^k until integral.
    Rational scaled = q;
    int k = 0;
    while (scaled.get_den() != 1) {
      scaled *= 10;
      scaled.canonicalize();
      ++k;
    }
    std::string digits = mpz_class(abs(scaled.get_num())).get_str();
    if (static_cast<int>(digits.size()) <= k) digits.insert(0, k - digits.size() + 1, '0');
    digits.insert(digits.size() - k, ".");
    return (q < 0 ? "-" : "") + digits;
  }
  os << std::setprecision(17) << q.get_d();
  return os.str();
}

void write_expr(std::ostream& os, const LinExpr& e, const std::map<VarId, LpVar>& vars) {
  bool first = true;
  for (const auto& [v, c] : e.terms) {
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    Rational mag = abs(c);
    if (mag != 1) os << lp_number(mag) << " ";
    auto it = vars.find(v);
    os << (it != vars.end() && !it->second.name.empty() ? it->second.name : "v" + std::to_string(v));
    first = false;
  }
  if (first) os << "0";
}

}  // namespace

void dump_cplex_lp(const LpProblem& p, std::ostream& os) {
  os << "\\ rabc resource-bound LP: " << p.vars.size() << " variables, " << p.constraints.size()
     << " constraints\n";
  os << "Minimize\n obj: ";
  write_expr(os, p.objective, p.vars);
  os << "\nSubject To\n";
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    const Constraint& c = p.constraints[i];
    LinExpr d = c.lhs - c.rhs;
    Rational b = -d.constant;
    d.constant = 0;
    if (!c.provenance.empty()) os << " \\ " << c.provenance << "\n";
    os << " c" << i << ": ";
    write_expr(os, d, p.vars);
    os << (c.rel == Rel::Eq ? " = " : " <= ") << lp_number(b) << "\n";
  }
  os << "Bounds\n";
  for (const auto& [id, v] : p.vars)
    if (v.kind == VarKind::Cost)
      os << " " << (v.name.empty() ? "v" + std::to_string(id) : v.name) << " free\n";
  os << "End\n";
}

}  // namespace rabc
