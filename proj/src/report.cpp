#include "rabc/report.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace rabc {

std::string signature_line(const AnalysisResult& an, const std::string& fn, bool current_only) {
  const FunctionAnalysis& fa = an.functions.at(fn);
  std::ostringstream os;
  os << fn << " : fn(";
  for (size_t i = 0; i < fa.sig.params.size(); ++i) {
    if (i) os << ", ";
    os << fa.sig.params[i].first << ": " << format_type(fa.sig.params[i].second, an.assignment, current_only);
  }
  os << ") -> " << format_type(fa.sig.ret, an.assignment, current_only) << " | "
     << to_string(an.value(fa.sig.delta));
  return os.str();
}

namespace {

nlohmann::json annotations_of(const RType& t, const AnalysisResult& an) {
  nlohmann::json out = nlohmann::json::array();
  for (VarId x : t.annotations()) out.push_back(to_string(an.value(x)));
  return out;
}

}  // namespace

nlohmann::json analysis_json(const AnalysisResult& an, bool current_only) {
  nlohmann::json fns = nlohmann::json::array();
  for (const auto& name : an.order) {
    auto it = an.functions.find(name);
    if (it == an.functions.end()) continue;
    const FunctionAnalysis& fa = it->second;
    bool solved = an.assignment.count(fa.sig.delta) != 0;
    nlohmann::json params = nlohmann::json::array();
    for (const auto& [pn, t] : fa.sig.params)
      params.push_back({{"name", pn},
                        {"type", format_type(t, an.assignment, current_only)},
                        {"annotations", annotations_of(t, an)}});
    const GroupAnalysis& g = an.groups.at(fa.group);
    nlohmann::json f = {
        {"name", name},
        {"params", params},
        {"ret", format_type(fa.sig.ret, an.assignment, current_only)},
        {"ret_annotations", annotations_of(fa.sig.ret, an)},
        {"delta", solved ? nlohmann::json(to_string(an.value(fa.sig.delta))) : nlohmann::json()},
        {"constraints_count", g.cons_end - g.cons_begin},
        {"group", fa.group},
    };
    if (solved) f["signature"] = signature_line(an, name, current_only);
    fns.push_back(f);
  }
  nlohmann::json j = {{"functions", fns}, {"solved", an.solved}};
  if (!an.error.empty()) j["error"] = an.error;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : an.groups) {
    nlohmann::json gj = {{"functions", g.functions},
                         {"status", to_string(g.status)},
                         {"variables", g.var_end - g.var_begin},
                         {"constraints", g.cons_end - g.cons_begin},
                         {"pivots", g.pivots}};
    if (!g.infeasible_core.empty()) gj["conflict"] = g.infeasible_core;
    groups.push_back(gj);
  }
  j["groups"] = groups;
  return j;
}

nlohmann::json fit_json(const FitReport& r) {
  nlohmann::json costs = nlohmann::json::array();
  for (auto c : r.costs) costs.push_back(c);
  nlohmann::json slack = nlohmann::json::array();
  for (const auto& s : r.soundness_slack) slack.push_back(to_string(s));
  return {{"fn", r.fn},
          {"sizes", r.sizes},
          {"costs", costs},
          {"bound_coeffs", {{"constant", to_string(r.constant)}, {"per_element", to_string(r.coeff)}}},
          {"soundness_slack", slack},
          {"slack_max", to_string(r.slack_max)},
          {"sound", r.sound},
          {"tight", r.tight}};
}

nlohmann::json assignment_json(const AnalysisResult& an) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [x, q] : an.assignment) j[an.an.info(x).name()] = to_string(q);
  return j;
}

Assignment load_assignment(const nlohmann::json& j, const AnalysisResult& an) {
  std::map<std::string, VarId> by_name;
  for (VarId x = 0; x < an.an.var_count(); ++x) by_name[an.an.info(x).name()] = x;
  Assignment out = an.assignment;
  const nlohmann::json& vals = j.contains("assignment") ? j["assignment"] : j;
  for (const auto& [name, val] : vals.items()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw std::invalid_argument("unknown variable '" + name + "' in assignment");
    out[it->second] = val.is_string() ? parse_rational(val.get<std::string>())
                                      : Rational(val.get<long>());
  }
  return out;
}

Value parse_value_literal(const std::string& text, const SimpleType& t) {
  const SimpleType* base = &t;
  while (base->is_ref()) base = base->inner.get();
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  auto parse_int = [&](const std::string& x) {
    size_t used = 0;
    long long v = std::stoll(x, &used);
    if (used != x.size()) throw std::invalid_argument("bad integer '" + x + "'");
    return static_cast<std::int64_t>(v);
  };
  switch (base->kind) {
    case TypeKind::I32: return Value::integer(parse_int(s));
    case TypeKind::Bool:
      if (s == "true") return Value::boolean(true);
      if (s == "false") return Value::boolean(false);
      throw std::invalid_argument("expected a bool, found '" + text + "'");
    case TypeKind::List:
    case TypeKind::BoxList: {
      if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw std::invalid_argument("expected a list literal like [1,2], found '" + text + "'");
      std::vector<std::int64_t> elems;
      std::string body = s.substr(1, s.size() - 2);
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) elems.push_back(parse_int(item));
      Value l = Value::list(elems);
      return base->kind == TypeKind::List ? l : Value::box(l);
    }
    case TypeKind::Unit: return Value::undef();
    default: break;
  }
  throw std::invalid_argument("cannot parse '" + text + "'");
}

std::string show_value(const Value& v, const SimpleType& t) {
  if (v.is_undef() && t.kind == TypeKind::Unit) return "()";
  return to_string(v);
}

}  // namespace rabc
