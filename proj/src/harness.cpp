#include "rabc/harness.hpp"

#include <stdexcept>

namespace rabc {

namespace {

[[noreturn]] void mismatch(const Value& v, const RType& t) {
  throw std::invalid_argument("value " + to_string(v) + " does not have type " + to_string(t));
}

Rational annot(VarId x, const Assignment& a) {
  auto it = a.find(x);
  return it == a.end() ? Rational(0) : it->second;
}

}  // namespace

Rational potential(const Value& v, const RType& t, const Assignment& a) {
  if (v.is_undef()) return 0;
  switch (t.kind()) {
    case RichKind::List:
      if (!v.is_list()) mismatch(v, t);
      return annot(t.annot(), a) * static_cast<unsigned long>(v.length());
    case RichKind::BoxList:
      if (v.kind() != Value::Kind::Box) mismatch(v, t);
      if (v.child().is_undef()) return 0;
      if (!v.child().is_list()) mismatch(v, t);
      return annot(t.annot(), a) * static_cast<unsigned long>(v.child().length());
    case RichKind::Shared:
      if (v.kind() != Value::Kind::Borrow) mismatch(v, t);
      return potential(v.child(), t.inner(), a);
    case RichKind::Mut:
      if (v.kind() != Value::Kind::Borrow) mismatch(v, t);
      return potential(v.child(), t.current(), a) - potential(v.child(), t.prophecy(), a);
    default: return 0;
  }
}

Rational potential_store(const Store& s, FrameId f, const Context& g, const Assignment& a) {
  Rational total = 0;
  for (const auto& [name, t] : g) total += potential(s.get(f, name), t, a);
  return total;
}

namespace {

Value scaffold(Store& s, const SimpleType& t, const Value& base, const std::string& slot) {
  if (!t.is_ref()) return base;
  Value inner = scaffold(s, *t.inner, base, slot + "_");
  s.set(Store::kRoot, slot, inner);
  return Value::borrow({Store::kRoot, Place::var(slot)}, inner);
}

}  // namespace

std::vector<Value> scaffold_args(Store& s, const Function& fn, const std::vector<Value>& base) {
  if (base.size() != fn.params.size())
    throw std::invalid_argument(fn.name + " expects " + std::to_string(fn.params.size()) +
                                " arguments");
  std::vector<Value> out;
  for (size_t i = 0; i < base.size(); ++i)
    out.push_back(scaffold(s, fn.params[i].type, base[i], "__own_" + fn.params[i].name));
  return out;
}

std::vector<Value> generate_inputs(const Function& fn, std::size_t n) {
  std::vector<std::int64_t> elems;
  for (std::size_t i = 1; i <= n; ++i) elems.push_back(static_cast<std::int64_t>(i));
  std::vector<Value> out;
  for (const auto& b : fn.params) {
    const SimpleType* t = &b.type;
    while (t->is_ref()) t = t->inner.get();
    switch (t->kind) {
      case TypeKind::List: out.push_back(Value::list(elems)); break;
      case TypeKind::BoxList: out.push_back(Value::box(Value::list(elems))); break;
      case TypeKind::I32: out.push_back(Value::integer(static_cast<std::int64_t>(n / 2))); break;
      case TypeKind::Bool: out.push_back(Value::boolean(n % 2 == 0)); break;
      default: out.push_back(Value::undef()); break;
    }
  }
  return out;
}

SoundnessReport check_soundness(const Program& prog, const AnalysisResult& an, const std::string& name,
                                const std::vector<Value>& base, const Assignment& a,
                                ExecOptions opts) {
  const Function* fn = prog.find(name);
  if (!fn) throw std::invalid_argument("no function '" + name + "'");
  const FunctionAnalysis& fa = an.functions.at(name);
  Interpreter in(prog, std::move(opts));
  Store& s = in.store();
  std::vector<Value> args = scaffold_args(s, *fn, base);
  FrameId f = s.push_frame();
  for (size_t i = 0; i < args.size(); ++i) s.set(f, fn->params[i].name, args[i]);

  SoundnessReport r;
  r.phi_in = potential_store(s, f, fa.entry, a);
  in.run_body(f, *fn);
  r.cost = in.cost();
  r.phi_out = potential_store(s, f, fa.exit, a);
  r.delta = annot(fa.sig.delta, a);
  r.slack = r.delta - (r.phi_out - r.phi_in + Rational(static_cast<long>(r.cost)));
  return r;
}

Rational per_element(const RType& t, const Assignment& a) {
  switch (t.kind()) {
    case RichKind::List:
    case RichKind::BoxList: return annot(t.annot(), a);
    case RichKind::Shared: return per_element(t.inner(), a);
    case RichKind::Mut: return per_element(t.current(), a) - per_element(t.prophecy(), a);
    default: return 0;
  }
}

FitReport measure_and_fit(const Program& prog, const AnalysisResult& an, const std::string& name,
                          std::size_t lo, std::size_t hi, const Assignment& a, ExecOptions opts) {
  const FunctionAnalysis& fa = an.functions.at(name);
  FitReport r;
  r.fn = name;
  r.constant = annot(fa.sig.delta, a);
  for (const auto& [_, t] : fa.sig.params) r.coeff += per_element(t, a);
  const Function& fn = *prog.find(name);
  for (std::size_t n = lo; n <= hi; ++n) {
    SoundnessReport s = check_soundness(prog, an, name, generate_inputs(fn, n), a, opts);
    Rational bound = r.constant + r.coeff * static_cast<unsigned long>(n);
    Rational gap = bound - Rational(static_cast<long>(s.cost));
    if (r.sizes.empty() || gap > r.slack_max) r.slack_max = gap;
    if (!r.bounds.empty() && gap != r.bounds.back() - Rational(static_cast<long>(r.costs.back())))
      r.tight = false;
    if (!s.ok() || gap < 0) r.sound = false;
    r.sizes.push_back(n);
    r.costs.push_back(s.cost);
    r.bounds.push_back(bound);
    r.soundness_slack.push_back(s.slack);
  }
  return r;
}

}  // namespace rabc
