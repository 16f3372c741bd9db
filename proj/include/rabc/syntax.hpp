#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabc {

struct SrcPos {
  int line = 0;
  int col = 0;
};

enum class TypeKind { I32, Bool, Unit, List, BoxList, SharedRef, MutRef };

struct SimpleType {
  TypeKind kind = TypeKind::Unit;
  std::shared_ptr<const SimpleType> inner;  // set for references only

  static SimpleType i32() { return {TypeKind::I32, nullptr}; }
  static SimpleType boolean() { return {TypeKind::Bool, nullptr}; }
  static SimpleType unit() { return {TypeKind::Unit, nullptr}; }
  static SimpleType list() { return {TypeKind::List, nullptr}; }
  static SimpleType box_list() { return {TypeKind::BoxList, nullptr}; }
  static SimpleType shared(SimpleType t);
  static SimpleType mut(SimpleType t);

  bool is_ref() const { return kind == TypeKind::SharedRef || kind == TypeKind::MutRef; }
  bool operator==(const SimpleType& o) const;
  bool operator!=(const SimpleType& o) const { return !(*this == o); }
};

std::string to_string(const SimpleType& t);

// A place is a variable under zero or more dereferences: *...*root.
struct Place {
  std::string root;
  unsigned derefs = 0;

  static Place var(std::string name) { return {std::move(name), 0}; }
  Place deref() const { return {root, derefs + 1}; }
  Place parent() const { return {root, derefs - 1}; }
  bool is_var() const { return derefs == 0; }
  bool operator==(const Place& o) const { return root == o.root && derefs == o.derefs; }
  bool operator!=(const Place& o) const { return !(*this == o); }
};

std::string to_string(const Place& p);

enum class BinOpKind { Add, Sub, Mul, Lt, Le, Eq };

const char* to_string(BinOpKind op);
bool is_comparison(BinOpKind op);

enum class ExprKind { Int, True, False, Nil, Box, BinOp, Copy, Shared, Mut, Move };

struct Expr {
  ExprKind kind = ExprKind::Nil;
  std::int64_t value = 0;
  BinOpKind op = BinOpKind::Add;
  Place place;
  std::vector<Expr> kids;  // Box: 1, BinOp: 2
  SrcPos pos;

  static Expr integer(std::int64_t v) { Expr e; e.kind = ExprKind::Int; e.value = v; return e; }
  static Expr boolean(bool b) { Expr e; e.kind = b ? ExprKind::True : ExprKind::False; return e; }
  static Expr nil() { return Expr{}; }
  static Expr box(Expr inner);
  static Expr binop(BinOpKind op, Expr l, Expr r);
  static Expr copy(Place p) { return with_place(ExprKind::Copy, std::move(p)); }
  static Expr shared(Place p) { return with_place(ExprKind::Shared, std::move(p)); }
  static Expr mut(Place p) { return with_place(ExprKind::Mut, std::move(p)); }
  static Expr move(Place p) { return with_place(ExprKind::Move, std::move(p)); }
  static Expr with_place(ExprKind k, Place p);

  bool operator==(const Expr& o) const;
  bool operator!=(const Expr& o) const { return !(*this == o); }
};

enum class StmtKind { Tick, Return, Drop, If, Match, Assign, AssignCons, AssignCall };

struct Stmt {
  StmtKind kind = StmtKind::Return;
  SrcPos pos;
  std::int64_t amount = 0;          // Tick
  Place place;                      // target / scrutinee / dropped place
  std::vector<Stmt> first;          // If then-branch, Match nil arm
  std::vector<Stmt> second;         // If else-branch, Match cons arm
  std::string hd, tl;               // Match binders
  Expr value;                       // Assign
  std::vector<Expr> args;           // AssignCons (head, tail) or AssignCall arguments
  std::string callee;               // AssignCall

  static Stmt tick(std::int64_t n);
  static Stmt ret();
  static Stmt drop(Place p);
  static Stmt if_(Place p, std::vector<Stmt> then_b, std::vector<Stmt> else_b);
  static Stmt match(Place p, std::vector<Stmt> nil_arm, std::string hd, std::string tl,
                    std::vector<Stmt> cons_arm);
  static Stmt assign(Place p, Expr e);
  static Stmt assign_cons(Place p, Expr head, Expr tail);
  static Stmt call(Place p, std::string fn, std::vector<Expr> args);

  bool operator==(const Stmt& o) const;
  bool operator!=(const Stmt& o) const { return !(*this == o); }
};

struct Binding {
  std::string name;
  SimpleType type;
  bool operator==(const Binding& o) const { return name == o.name && type == o.type; }
};

struct Function {
  std::string name;
  std::vector<Binding> params;
  SimpleType ret_type;
  std::vector<Binding> locals;
  std::vector<Stmt> body;
  SrcPos pos;

  bool operator==(const Function& o) const;
  // Declared type of a parameter, local or ret; nullptr if unknown.
  const SimpleType* lookup(const std::string& name) const;
};

struct Program {
  std::vector<Function> functions;

  const Function* find(const std::string& name) const;
  bool operator==(const Program& o) const { return functions == o.functions; }
};

inline constexpr const char* kRetVar = "ret";

class ParseError : public std::runtime_error {
 public:
  ParseError(SrcPos pos, std::vector<std::string> expected, std::string found);
  SrcPos pos;
  std::vector<std::string> expected;
  std::string found;
};

Program parse(const std::string& source);
std::string print(const Program& p);
std::string print(const Function& f);
std::string print(const Expr& e);

struct Violation {
  std::string function;
  SrcPos pos;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const Program& p);

// Strongly connected components of the call graph, callees before callers.
// Each inner vector holds function names in program order.
std::vector<std::vector<std::string>> call_graph_sccs(const Program& p);

}  // namespace rabc
