#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rabc/lp.hpp"
#include "rabc/syntax.hpp"

namespace rabc {

enum class RichKind { Bot, Int, Bool, Unit, List, BoxList, Shared, Mut };

// Simple types decorated with per-element potential annotations. A mutable
// reference carries its current type and its prophecy (the type promised
// back to the lender when the borrow ends).
class RType {
 public:
  RType() = default;  // Bot
  static RType bot() { return {}; }
  static RType i32();
  static RType boolean();
  static RType unit();
  static RType list(VarId a);
  static RType box_list(VarId a);
  static RType shared(RType inner);
  static RType mut(RType current, RType prophecy);

  RichKind kind() const { return kind_; }
  bool is_bot() const { return kind_ == RichKind::Bot; }
  bool is_atom() const;
  VarId annot() const { return annot_; }          // List, BoxList
  const RType& inner() const { return *a_; }      // Shared
  const RType& current() const { return *a_; }    // Mut
  const RType& prophecy() const { return *b_; }   // Mut
  bool contains_mut() const;

  // Every annotation variable in a fixed traversal order.
  std::vector<VarId> annotations() const;
  // Same shape with each annotation variable renamed by f.
  template <class F>
  RType rename(F&& f) const;

  bool operator==(const RType& o) const;
  bool operator!=(const RType& o) const { return !(*this == o); }

 private:
  RichKind kind_ = RichKind::Bot;
  VarId annot_ = 0;
  std::shared_ptr<const RType> a_, b_;
};

template <class F>
RType RType::rename(F&& f) const {
  switch (kind_) {
    case RichKind::List: return list(f(annot_));
    case RichKind::BoxList: return box_list(f(annot_));
    case RichKind::Shared: return shared(a_->rename(f));
    case RichKind::Mut: return mut(a_->rename(f), b_->rename(f));
    default: return *this;
  }
}

std::optional<SimpleType> erase(const RType& t);  // nullopt for Bot

class TypingError : public std::runtime_error {
 public:
  enum class Kind { Shape, BotRead, NoShareOfMut, CopyOfNonAtom, Unassigned, Infeasible, Unbounded };
  TypingError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

const char* to_string(TypingError::Kind k);

struct VarInfo {
  VarKind kind = VarKind::Potential;
  std::string tag;  // rule instance that created it
  std::string name() const;
  VarId id = 0;
};

// Registry of annotation variables plus the constraints collected so far.
class Annotator {
 public:
  VarId fresh(VarKind k, std::string tag);
  const VarInfo& info(VarId v) const { return vars_.at(v); }
  std::size_t var_count() const { return vars_.size(); }

  void emit(Constraint c);
  void emit(const std::vector<Constraint>& cs);
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::size_t constraint_count() const { return constraints_.size(); }

  // Location used to tag constraints and variables, e.g. "iter 4:3".
  std::string site;
  std::string at(const std::string& rule) const { return site.empty() ? rule : rule + " @ " + site; }

 private:
  std::vector<VarInfo> vars_;
  std::vector<Constraint> constraints_;
};

// One fresh potential variable per list or box position.
RType enrich(Annotator& an, const SimpleType& t, const std::string& tag = "enrich");

// t1 <: t2: every value has no more potential under t1 than under t2.
std::vector<Constraint> subtype(const RType& t1, const RType& t2, const std::string& why);
// Well-formedness: non-negative list annotations and dropping conditions.
std::vector<Constraint> wellformed(const RType& t, const std::string& why);
// Pairwise equality of annotations; shapes must agree.
std::vector<Constraint> equate(const RType& t1, const RType& t2, const std::string& why);

struct Shared {
  RType kept, lent;
  std::vector<Constraint> constraints;
};
// Splits potential between the place (kept) and a new shared borrow (lent).
Shared share(Annotator& an, const RType& t);

// Fresh annotations with the same shape.
RType prophesy(Annotator& an, const RType& t);

struct Merged {
  RType type;
  std::vector<Constraint> constraints;
};
// Greatest lower / least upper bound under subtyping, relaxed with fresh
// variables. Mutable borrows also get their dropping conditions.
Merged meet(Annotator& an, const RType& t1, const RType& t2);
Merged join(Annotator& an, const RType& t1, const RType& t2);

// Display helpers: "list(a3)" or, with an assignment, "list(2)".
std::string to_string(const RType& t, const Annotator* an = nullptr);
std::string format_type(const RType& t, const Assignment& a, bool current_only = false);

}  // namespace rabc
