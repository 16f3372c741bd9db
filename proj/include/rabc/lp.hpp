#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace rabc {

using Rational = mpq_class;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);

using VarId = std::uint32_t;

// Potential variables are non-negative; cost variables are free.
enum class VarKind { Potential, Cost };

using Assignment = std::map<VarId, Rational>;

struct LinExpr {
  std::map<VarId, Rational> terms;  // no zero coefficients
  Rational constant = 0;

  LinExpr() = default;
  LinExpr(Rational c) : constant(std::move(c)) {}  // NOLINT(implicit)
  LinExpr(int c) : constant(c) {}                   // NOLINT(implicit)
  static LinExpr var(VarId v, Rational coeff = 1);

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(const Rational& k);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(const Rational& k, LinExpr a) { return a *= k; }

  bool is_constant() const { return terms.empty(); }
  Rational eval(const Assignment& a) const;  // missing variables read as 0
  bool operator==(const LinExpr& o) const { return terms == o.terms && constant == o.constant; }
};

enum class Rel { Le, Eq };

// lhs (<= | =) rhs, tagged with the rule instance that produced it.
struct Constraint {
  LinExpr lhs;
  Rel rel = Rel::Le;
  LinExpr rhs;
  std::string provenance;

  bool holds(const Assignment& a) const;
};

Constraint le(LinExpr a, LinExpr b, std::string prov = {});
Constraint ge(LinExpr a, LinExpr b, std::string prov = {});
Constraint eq(LinExpr a, LinExpr b, std::string prov = {});

std::string to_string(const LinExpr& e, const std::map<VarId, std::string>* names = nullptr);
std::string to_string(const Constraint& c, const std::map<VarId, std::string>* names = nullptr);

struct LpVar {
  VarKind kind = VarKind::Potential;
  std::string name;
};

struct LpProblem {
  std::map<VarId, LpVar> vars;  // every variable used must be declared here
  std::vector<Constraint> constraints;
  LinExpr objective;  // minimised
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Assignment assignment;  // every declared variable, when Optimal
  Rational objective = 0;
  std::vector<size_t> infeasible_hint;  // constraint indices with non-zero Farkas multipliers
  size_t pivots = 0;
};

// Exact two-phase simplex with Bland's rule.
LpResult solve(const LpProblem& p);

// CPLEX LP text; fractional coefficients are written as exact decimals when
// possible and as 17-digit approximations otherwise.
void dump_cplex_lp(const LpProblem& p, std::ostream& os);

}  // namespace rabc
