// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "checks.hpp"
#include "rabc/harness.hpp"
#include "util.hpp"

using namespace rabc;

namespace {

struct Analyzed {
  Program prog;
  AnalysisResult res;
};

Analyzed load(const std::string& file) {
  Program p = testutil::corpus(file);
  AnalysisResult r = analyze_program(p);
  if (!r.solved) throw std::runtime_error(file + ": " + r.error);
  return {std::move(p), std::move(r)};
}

const Signature& sig(const Analyzed& a, const std::string& fn) { return a.res.functions.at(fn).sig; }
Rational delta(const Analyzed& a, const std::string& fn) { return a.res.value(sig(a, fn).delta); }
Rational coeff(const Analyzed& a, const std::string& fn) {
  Rational c = 0;
  for (const auto& [_, t] : sig(a, fn).params) c += per_element(t, a.res.assignment);
  return c;
}

// Collects failure messages for one criterion.
struct Verdict {
  std::vector<std::string> problems;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.problems.push_back(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    std::ostringstream os;
    os << "took longer than " << limit_s << " s";
    v.problems.push_back(os.str());
  }
  bool ok = v.problems.empty();
  if (!ok) ++failures;
  std::printf("%s %d %s (%.2f s)", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
  if (!v.detail.empty()) std::printf(" [%s]", v.detail.c_str());
  std::printf("\n");
  for (const auto& p : v.problems) std::printf("     - %s\n", p.c_str());
  std::fflush(stdout);
}

std::string show(const Rational& q) { return to_string(q); }

// x <= y between two single variables with unit coefficients.
std::optional<std::pair<VarId, VarId>> var_le(const Constraint& c) {
  auto single = [](const LinExpr& e) -> std::optional<VarId> {
    if (e.constant != 0 || e.terms.size() != 1 || e.terms.begin()->second != 1) return std::nullopt;
    return e.terms.begin()->first;
  };
  if (c.rel != Rel::Le) return std::nullopt;
  auto l = single(c.lhs), r = single(c.rhs);
  if (!l || !r) return std::nullopt;
  return std::make_pair(*l, *r);
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

void check_weak_merge(Verdict& v) {
  Analyzed w = load("weak.rabc");
  const auto& g = w.res.groups.at(w.res.functions.at("weak").group);
  const auto& cs = w.res.an.constraints();

  // Merge constraints emitted inside weak itself, keyed by rule.
  std::map<std::string, std::vector<std::pair<VarId, VarId>>> by_rule;
  for (size_t i = g.cons_begin; i < g.cons_end; ++i) {
    const Constraint& c = cs[i];
    if (c.provenance.find(" @ weak ") == std::string::npos) continue;
    auto le = var_le(c);
    if (!le) continue;
    for (const char* rule : {"meet:lhs", "meet:rhs", "join:lhs", "join:rhs", "meet-mutable:drop"})
      if (starts_with(c.provenance, std::string(rule) + " @")) by_rule[rule].push_back(*le);
  }
  auto has = [&](const char* rule, VarId lo, VarId hi) {
    for (const auto& [a, b] : by_rule[rule])
      if (a == lo && b == hi) return true;
    return false;
  };

  // The borrow merged at the branch: current c <= both currents x1, x2,
  // prophecy p >= both prophecies y1, y2, and y_i <= x_i for each input.
  struct Merge {
    VarId c, x1, x2, p, y1, y2;
  };
  std::optional<Merge> found;
  for (const auto& [c, x1] : by_rule["meet:lhs"])
    for (const auto& [c2, x2] : by_rule["meet:rhs"]) {
      if (c2 != c) continue;
      for (const auto& [y1, p] : by_rule["join:lhs"])
        for (const auto& [y2, p2] : by_rule["join:rhs"])
          if (p2 == p && has("meet-mutable:drop", y1, x1) && has("meet-mutable:drop", y2, x2))
            found = Merge{c, x1, x2, p, y1, y2};
    }
  v.expect(found.has_value(), "no mutable-borrow merge with all five constraint kinds at the branch");
  if (!found) return;
  const Merge m = *found;

  // Probe with the solved assignment and with perturbations of it.
  const Assignment& a = w.res.assignment;
  auto val = [&](VarId x) { return w.res.value(x); };
  std::vector<Constraint> group(cs.begin() + static_cast<long>(g.cons_begin), cs.begin() + static_cast<long>(g.cons_end));
  auto holds = [&](const Assignment& s) {
    for (const auto& c : group)
      if (!c.holds(s)) return false;
    return true;
  };
  v.expect(holds(a), "solved assignment violates a constraint");
  v.expect(val(m.c) <= std::min(val(m.x1), val(m.x2)), "merged current exceeds a branch current");
  v.expect(val(m.p) >= std::max(val(m.y1), val(m.y2)), "merged prophecy below a branch prophecy");
  v.expect(val(m.y1) <= val(m.x1) && val(m.y2) <= val(m.x2), "a dropping condition fails");

  Assignment probe = a;
  probe[m.c] = std::min(val(m.x1), val(m.x2)) + 1;
  v.expect(!holds(probe), "current above the minimum is not rejected");
  probe = a;
  probe[m.p] = std::max(val(m.y1), val(m.y2)) - 1;
  v.expect(!holds(probe), "prophecy below the maximum is not rejected");
  probe = a;
  probe[m.y1] = val(m.x1) + 1;
  v.expect(!holds(probe), "first dropping condition is not enforced");
  probe = a;
  probe[m.y2] = val(m.x2) + 1;
  v.expect(!holds(probe), "second dropping condition is not enforced");

  v.detail = "current " + show(val(m.c)) + " <= min(" + show(val(m.x1)) + ", " + show(val(m.x2)) +
             "), prophecy " + show(val(m.p)) + " >= max(" + show(val(m.y1)) + ", " + show(val(m.y2)) + ")";
}

// Cost of one run at size 0, used as the measured call overhead.
std::int64_t cost_at_zero(const Analyzed& a, const std::string& fn) {
  return check_soundness(a.prog, a.res, fn, generate_inputs(*a.prog.find(fn), 0), a.res.assignment).cost;
}

struct Benchmark {
  std::string file, fn;
};

const std::vector<Benchmark> kTight = {{"iter.rabc", "iter"},
                                       {"iter_twice.rabc", "iter_twice"},
                                       {"update.rabc", "update"},
                                       {"sum.rabc", "sum_rec"},
                                       {"rev.rabc", "rev_rec"}};

}  // namespace

int main() {
  criterion(1, "iter: fn(l: &list(2)) -> unit | 1", 1, [](Verdict& v) {
    Analyzed a = load("iter.rabc");
    const Signature& s = sig(a, "iter");
    v.expect(s.params.size() == 1 && s.params[0].second.kind() == RichKind::Shared, "parameter is not a shared list");
    v.expect(coeff(a, "iter") == 2, "coefficient " + show(coeff(a, "iter")));
    v.expect(delta(a, "iter") == 1, "constant " + show(delta(a, "iter")));
    v.detail = "coefficient " + show(coeff(a, "iter")) + ", constant " + show(delta(a, "iter"));
  });

  criterion(2, "iter_twice: fn(l: &list(4)) -> unit | 2", 1, [](Verdict& v) {
    Analyzed a = load("iter_twice.rabc");
    v.expect(coeff(a, "iter_twice") == 4, "coefficient " + show(coeff(a, "iter_twice")));
    v.expect(delta(a, "iter_twice") == 2, "constant " + show(delta(a, "iter_twice")));
    v.detail = "coefficient " + show(coeff(a, "iter_twice")) + ", constant " + show(delta(a, "iter_twice"));
  });

  criterion(3, "update: fn(l: &mut list(2, 0)) -> unit | 7", 1, [](Verdict& v) {
    Analyzed a = load("update.rabc");
    const Signature& s = sig(a, "update");
    if (s.params.size() != 1 || s.params[0].second.kind() != RichKind::Mut) {
      v.expect(false, "parameter is not a mutable borrow");
      return;
    }
    const RType& t = s.params[0].second;
    Rational cur = per_element(t.current(), a.res.assignment), pro = per_element(t.prophecy(), a.res.assignment);
    v.expect(cur == 2, "current " + show(cur));
    v.expect(pro == 0, "prophecy " + show(pro));
    v.expect(delta(a, "update") == 7, "constant " + show(delta(a, "update")));
    v.detail = "current " + show(cur) + ", prophecy " + show(pro) + ", constant " + show(delta(a, "update"));
  });

  criterion(4, "weak update merges mutable borrows conservatively", 1, check_weak_merge);

  criterion(5, "relational claims: sum2, rev2, dup2", 5, [](Verdict& v) {
    Analyzed sum = load("sum.rabc");
    std::int64_t overhead = cost_at_zero(sum, "sum2") - 2 * cost_at_zero(sum, "sum_rec");
    v.expect(coeff(sum, "sum2") == 2 * coeff(sum, "sum_rec"), "sum2 coefficient " + show(coeff(sum, "sum2")));
    v.expect(delta(sum, "sum2") == 2 * delta(sum, "sum_rec") + overhead, "sum2 constant " + show(delta(sum, "sum2")));
    Analyzed rev = load("rev.rabc");
    v.expect(coeff(rev, "rev2") == 2 * coeff(rev, "rev"), "rev2 coefficient " + show(coeff(rev, "rev2")));
    Analyzed dup = load("dup.rabc");
    v.expect(coeff(dup, "dup2") == 3 * coeff(dup, "dup"), "dup2 coefficient " + show(coeff(dup, "dup2")));
    v.detail = "sum " + show(coeff(sum, "sum_rec")) + "|" + show(delta(sum, "sum_rec")) + " -> " +
               show(coeff(sum, "sum2")) + "|" + show(delta(sum, "sum2")) + " (overhead " +
               std::to_string(overhead) + "), rev " + show(coeff(rev, "rev")) + " -> " +
               show(coeff(rev, "rev2")) + ", dup " + show(coeff(dup, "dup")) + " -> " + show(coeff(dup, "dup2"));
  });

  // Criteria 6 and 7 share one measurement pass.
  std::map<std::string, FitReport> fits;
  criterion(6, "soundness on every corpus function, sizes 0..50", 30, [&](Verdict& v) {
    size_t functions = 0, runs = 0;
    for (const auto& file : testutil::corpus_files()) {
      Analyzed a = load(file);
      for (const auto& fn : a.prog.functions) {
        FitReport f = measure_and_fit(a.prog, a.res, fn.name, 0, 50, a.res.assignment);
        ++functions;
        runs += f.sizes.size();
        for (size_t i = 0; i < f.sizes.size(); ++i)
          v.expect(f.soundness_slack[i] >= 0, file + ":" + fn.name + " violated at n = " +
                                                  std::to_string(f.sizes[i]));
        v.expect(f.sound, file + ":" + fn.name + " not sound");
        fits[file + ":" + fn.name] = std::move(f);
      }
    }
    v.expect(functions >= 14, "only " + std::to_string(functions) + " functions");
    v.detail = std::to_string(functions) + " functions, " + std::to_string(runs) + " runs";
  });

  criterion(7, "tightness of straight-line bounds, upper bounds for branches", 30, [&](Verdict& v) {
    for (const auto& b : kTight) {
      auto it = fits.find(b.file + ":" + b.fn);
      if (it == fits.end()) {
        v.expect(false, b.fn + " was not measured");
        continue;
      }
      for (size_t i = 0; i < it->second.sizes.size(); ++i)
        v.expect(it->second.soundness_slack[i] == 0, b.fn + " has slack " + show(it->second.soundness_slack[i]) +
                                                         " at n = " + std::to_string(it->second.sizes[i]));
      v.expect(it->second.tight, b.fn + " bound is not tight");
    }
    size_t branchy = 0;
    for (const std::string key : {"branch.rabc:count_small", "weak.rabc:weak", "parity.rabc:even_len",
                                  "parity.rabc:odd_len"}) {
      auto it = fits.find(key);
      if (it == fits.end()) {
        v.expect(false, key + " was not measured");
        continue;
      }
      ++branchy;
      for (const auto& s : it->second.soundness_slack) v.expect(s >= 0, key + " has negative slack");
    }
    v.detail = std::to_string(kTight.size()) + " tight, " + std::to_string(branchy) + " branching";
  });

  criterion(8, "lowering a solved constant by one is detected", 10, [](Verdict& v) {
    for (const auto& b : kTight) {
      Analyzed a = load(b.file);
      Assignment bad = a.res.assignment;
      bad[sig(a, b.fn).delta] -= 1;
      bool caught = false;
      const Function& fn = *a.prog.find(b.fn);
      for (size_t n = 0; n <= 50 && !caught; ++n)
        caught = !check_soundness(a.prog, a.res, b.fn, generate_inputs(fn, n), bad).ok();
      v.expect(caught, b.fn + ": no violation found");
    }
  });

  criterion(9, "property suites", 60, [](Verdict& v) {
    auto report = [&](const std::string& name, const checks::Stats& s, int wanted) {
      v.expect(s.ok(wanted), name + ": " + std::to_string(s.violations) + " violations in " +
                                 std::to_string(s.cases) + " cases; first: " + s.first_failure);
      return name + " " + std::to_string(s.cases);
    };
    std::string d;
    d += report("monotonicity", checks::potential_monotone(1000, 11), 1000) + ", ";
    d += report("share", checks::share_conserves(1000, 12), 1000) + ", ";
    d += report("store update", checks::store_update(1000, 13), 1000) + ", ";
    d += report("context update", checks::context_update(1000, 14), 1000) + ", ";
    d += report("evaluation", checks::expression_potential(1000, 15), 1000) + ", ";
    d += report("lp", checks::lp_matches_vertices(200, 16), 200);
    v.detail = d;
  });

  std::printf("%s\n", failures == 0 ? "ALL PASS" : (std::to_string(failures) + " FAILED").c_str());
  return failures == 0 ? 0 : 1;
}
