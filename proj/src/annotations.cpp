#include "rabc/annotations.hpp"

#include <cctype>

namespace rabc {

RType RType::i32() {
  RType t;
  t.kind_ = RichKind::Int;
  return t;
}

RType RType::boolean() {
  RType t;
  t.kind_ = RichKind::Bool;
  return t;
}

RType RType::unit() {
  RType t;
  t.kind_ = RichKind::Unit;
  return t;
}

RType RType::list(VarId a) {
  RType t;
  t.kind_ = RichKind::List;
  t.annot_ = a;
  return t;
}

RType RType::box_list(VarId a) {
  RType t;
  t.kind_ = RichKind::BoxList;
  t.annot_ = a;
  return t;
}

RType RType::shared(RType inner) {
  RType t;
  t.kind_ = RichKind::Shared;
  t.a_ = std::make_shared<const RType>(std::move(inner));
  return t;
}

RType RType::mut(RType current, RType prophecy) {
  RType t;
  t.kind_ = RichKind::Mut;
  t.a_ = std::make_shared<const RType>(std::move(current));
  t.b_ = std::make_shared<const RType>(std::move(prophecy));
  return t;
}

bool RType::is_atom() const {
  return kind_ == RichKind::Int || kind_ == RichKind::Bool || kind_ == RichKind::Unit;
}

bool RType::contains_mut() const {
  if (kind_ == RichKind::Mut) return true;
  if (kind_ == RichKind::Shared) return a_->contains_mut();
  return false;
}

std::vector<VarId> RType::annotations() const {
  std::vector<VarId> out;
  switch (kind_) {
    case RichKind::List:
    case RichKind::BoxList: out.push_back(annot_); break;
    case RichKind::Shared: out = a_->annotations(); break;
    case RichKind::Mut: {
      out = a_->annotations();
      auto p = b_->annotations();
      out.insert(out.end(), p.begin(), p.end());
      break;
    }
    default: break;
  }
  return out;
}

bool RType::operator==(const RType& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case RichKind::List:
    case RichKind::BoxList: return annot_ == o.annot_;
    case RichKind::Shared: return *a_ == *o.a_;
    case RichKind::Mut: return *a_ == *o.a_ && *b_ == *o.b_;
    default: return true;
  }
}

std::optional<SimpleType> erase(const RType& t) {
  switch (t.kind()) {
    case RichKind::Bot: return std::nullopt;
    case RichKind::Int: return SimpleType::i32();
    case RichKind::Bool: return SimpleType::boolean();
    case RichKind::Unit: return SimpleType::unit();
    case RichKind::List: return SimpleType::list();
    case RichKind::BoxList: return SimpleType::box_list();
    case RichKind::Shared: {
      auto in = erase(t.inner());
      if (!in) return std::nullopt;
      return SimpleType::shared(*in);
    }
    case RichKind::Mut: {
      auto in = erase(t.current());
      if (!in) in = erase(t.prophecy());
      if (!in) return std::nullopt;
      return SimpleType::mut(*in);
    }
  }
  return std::nullopt;
}

const char* to_string(TypingError::Kind k) {
  switch (k) {
    case TypingError::Kind::Shape: return "shape";
    case TypingError::Kind::BotRead: return "moved-value";
    case TypingError::Kind::NoShareOfMut: return "share-of-mutable";
    case TypingError::Kind::CopyOfNonAtom: return "copy-of-non-atom";
    case TypingError::Kind::Unassigned: return "unassigned";
    case TypingError::Kind::Infeasible: return "infeasible";
    case TypingError::Kind::Unbounded: return "unbounded";
  }
  return "?";
}

std::string VarInfo::name() const {
  std::string base = (kind == VarKind::Potential ? "a" : "d") + std::to_string(id);
  std::string clean;
  for (char c : tag)
    clean += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return clean.empty() ? base : base + "_" + clean;
}

VarId Annotator::fresh(VarKind k, std::string tag) {
  VarInfo vi;
  vi.kind = k;
  vi.tag = std::move(tag);
  vi.id = static_cast<VarId>(vars_.size());
  vars_.push_back(std::move(vi));
  return vars_.back().id;
}

void Annotator::emit(Constraint c) { constraints_.push_back(std::move(c)); }

void Annotator::emit(const std::vector<Constraint>& cs) {
  constraints_.insert(constraints_.end(), cs.begin(), cs.end());
}

RType enrich(Annotator& an, const SimpleType& t, const std::string& tag) {
  switch (t.kind) {
    case TypeKind::I32: return RType::i32();
    case TypeKind::Bool: return RType::boolean();
    case TypeKind::Unit: return RType::unit();
    case TypeKind::List: return RType::list(an.fresh(VarKind::Potential, tag));
    case TypeKind::BoxList: return RType::box_list(an.fresh(VarKind::Potential, tag));
    case TypeKind::SharedRef: return RType::shared(enrich(an, *t.inner, tag));
    case TypeKind::MutRef: {
      RType cur = enrich(an, *t.inner, tag);
      RType pro = enrich(an, *t.inner, tag);
      return RType::mut(std::move(cur), std::move(pro));
    }
  }
  return {};
}

namespace {

[[noreturn]] void shape_error(const char* op, const RType& a, const RType& b) {
  throw TypingError(TypingError::Kind::Shape, std::string(op) + ": incompatible types " +
                                                  to_string(a) + " and " + to_string(b));
}

LinExpr v(VarId x) { return LinExpr::var(x); }

}  // namespace

std::vector<Constraint> subtype(const RType& t1, const RType& t2, const std::string& why) {
  if (t1.is_bot()) return {};
  if (t1.kind() != t2.kind()) shape_error("subtype", t1, t2);
  switch (t1.kind()) {
    case RichKind::List:
    case RichKind::BoxList: return {le(v(t1.annot()), v(t2.annot()), why)};
    case RichKind::Shared: return subtype(t1.inner(), t2.inner(), why);
    case RichKind::Mut: {
      auto out = subtype(t1.current(), t2.current(), why);
      auto p = subtype(t2.prophecy(), t1.prophecy(), why);
      out.insert(out.end(), p.begin(), p.end());
      return out;
    }
    default: return {};
  }
}

std::vector<Constraint> wellformed(const RType& t, const std::string& why) {
  switch (t.kind()) {
    case RichKind::List:
    case RichKind::BoxList: return {ge(v(t.annot()), 0, why)};
    case RichKind::Shared: return wellformed(t.inner(), why);
    case RichKind::Mut: {
      auto out = subtype(t.prophecy(), t.current(), why);
      for (const auto* part : {&t.current(), &t.prophecy()}) {
        auto w = wellformed(*part, why);
        out.insert(out.end(), w.begin(), w.end());
      }
      return out;
    }
    default: return {};
  }
}

std::vector<Constraint> equate(const RType& t1, const RType& t2, const std::string& why) {
  if (t1.kind() != t2.kind()) shape_error("equate", t1, t2);
  switch (t1.kind()) {
    case RichKind::List:
    case RichKind::BoxList:
      if (t1.annot() == t2.annot()) return {};
      return {eq(v(t1.annot()), v(t2.annot()), why)};
    case RichKind::Shared: return equate(t1.inner(), t2.inner(), why);
    case RichKind::Mut: {
      auto out = equate(t1.current(), t2.current(), why);
      auto p = equate(t1.prophecy(), t2.prophecy(), why);
      out.insert(out.end(), p.begin(), p.end());
      return out;
    }
    default: return {};
  }
}

Shared share(Annotator& an, const RType& t) {
  switch (t.kind()) {
    case RichKind::Int:
    case RichKind::Bool:
    case RichKind::Unit: return {t, t, {}};
    case RichKind::List:
    case RichKind::BoxList: {
      VarId a1 = an.fresh(VarKind::Potential, "share");
      VarId a2 = an.fresh(VarKind::Potential, "share");
      RType k = t.kind() == RichKind::List ? RType::list(a1) : RType::box_list(a1);
      RType l = t.kind() == RichKind::List ? RType::list(a2) : RType::box_list(a2);
      return {k, l, {eq(v(t.annot()), v(a1) + v(a2), an.at("share"))}};
    }
    case RichKind::Shared: {
      Shared in = share(an, t.inner());
      return {RType::shared(in.kept), RType::shared(in.lent), std::move(in.constraints)};
    }
    case RichKind::Mut:
      throw TypingError(TypingError::Kind::NoShareOfMut,
                        "cannot share a mutable reference " + to_string(t));
    case RichKind::Bot:
      throw TypingError(TypingError::Kind::BotRead, "cannot borrow a moved value");
  }
  return {};
}

RType prophesy(Annotator& an, const RType& t) {
  switch (t.kind()) {
    case RichKind::List: return RType::list(an.fresh(VarKind::Potential, "prophecy"));
    case RichKind::BoxList: return RType::box_list(an.fresh(VarKind::Potential, "prophecy"));
    case RichKind::Shared: return RType::shared(prophesy(an, t.inner()));
    case RichKind::Mut: {
      RType c = prophesy(an, t.current());
      RType p = prophesy(an, t.prophecy());
      return RType::mut(std::move(c), std::move(p));
    }
    case RichKind::Bot:
      throw TypingError(TypingError::Kind::BotRead, "cannot borrow a moved value");
    default: return t;
  }
}

namespace {

Merged merge(Annotator& an, const RType& t1, const RType& t2, bool is_meet) {
  const char* rule = is_meet ? "meet" : "join";
  if (t1.is_bot() || t2.is_bot()) {
    if (!is_meet) return {t1.is_bot() ? t2 : t1, {}};
    const RType& other = t1.is_bot() ? t2 : t1;
    return {RType::bot(), wellformed(other, an.at("meet-drop"))};
  }
  if (t1.kind() != t2.kind()) shape_error(rule, t1, t2);
  switch (t1.kind()) {
    case RichKind::List:
    case RichKind::BoxList: {
      if (t1.annot() == t2.annot()) return {t1, {}};
      VarId c = an.fresh(VarKind::Potential, rule);
      RType out = t1.kind() == RichKind::List ? RType::list(c) : RType::box_list(c);
      std::vector<Constraint> cs;
      if (is_meet) {
        cs.push_back(le(v(c), v(t1.annot()), an.at("meet:lhs")));
        cs.push_back(le(v(c), v(t2.annot()), an.at("meet:rhs")));
      } else {
        cs.push_back(ge(v(c), v(t1.annot()), an.at("join:lhs")));
        cs.push_back(ge(v(c), v(t2.annot()), an.at("join:rhs")));
      }
      return {out, cs};
    }
    case RichKind::Shared: {
      Merged in = merge(an, t1.inner(), t2.inner(), is_meet);
      return {RType::shared(in.type), std::move(in.constraints)};
    }
    case RichKind::Mut: {
      Merged c = merge(an, t1.current(), t2.current(), is_meet);
      Merged p = merge(an, t1.prophecy(), t2.prophecy(), !is_meet);
      std::vector<Constraint> cs = std::move(c.constraints);
      cs.insert(cs.end(), p.constraints.begin(), p.constraints.end());
      const std::string drop = an.at(is_meet ? "meet-mutable:drop" : "join-mutable:drop");
      for (const RType* t : {&t1, &t2}) {
        auto d = subtype(t->prophecy(), t->current(), drop);
        cs.insert(cs.end(), d.begin(), d.end());
      }
      return {RType::mut(std::move(c.type), std::move(p.type)), std::move(cs)};
    }
    default: return {t1, {}};
  }
}

}  // namespace

Merged meet(Annotator& an, const RType& t1, const RType& t2) { return merge(an, t1, t2, true); }
Merged join(Annotator& an, const RType& t1, const RType& t2) { return merge(an, t1, t2, false); }

namespace {

template <class Ann>
std::string render(const RType& t, Ann&& annot, bool current_only) {
  switch (t.kind()) {
    case RichKind::Bot: return "⊥";
    case RichKind::Int: return "i32";
    case RichKind::Bool: return "bool";
    case RichKind::Unit: return "unit";
    case RichKind::List: return "list(" + annot(t.annot()) + ")";
    case RichKind::BoxList: return "box list(" + annot(t.annot()) + ")";
    case RichKind::Shared: return "&" + render(t.inner(), annot, current_only);
    case RichKind::Mut: {
      const RType& c = t.current();
      const RType& p = t.prophecy();
      if (current_only) return "&mut " + render(c, annot, current_only);
      if (c.kind() == p.kind() && (c.kind() == RichKind::List || c.kind() == RichKind::BoxList))
        return std::string("&mut ") + (c.kind() == RichKind::List ? "list(" : "box list(") +
               annot(c.annot()) + ", " + annot(p.annot()) + ")";
      return "&mut(" + render(c, annot, current_only) + ", " + render(p, annot, current_only) + ")";
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const RType& t, const Annotator* an) {
  return render(
      t, [&](VarId x) { return an ? an->info(x).name() : "a" + std::to_string(x); }, false);
}

std::string format_type(const RType& t, const Assignment& a, bool current_only) {
  return render(
      t,
      [&](VarId x) {
        auto it = a.find(x);
        return it == a.end() ? std::string("?") : to_string(it->second);
      },
      current_only);
}

}  // namespace rabc
