#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "rabc/syntax.hpp"
#include "util.hpp"

using namespace rabc;

namespace {

size_t count_stmts(const std::vector<Stmt>& body, StmtKind k) {
  size_t n = 0;
  for (const auto& s : body) {
    if (s.kind == k) ++n;
    n += count_stmts(s.first, k) + count_stmts(s.second, k);
  }
  return n;
}

bool has_violation(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations)
    if (v.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("parse a minimal function") {
  Program p = parse("fn main() -> i32 { ret := 0; return; }");
  REQUIRE(p.functions.size() == 1);
  const Function& f = p.functions[0];
  CHECK(f.name == "main");
  CHECK(f.ret_type == SimpleType::i32());
  REQUIRE(f.body.size() == 2);
  CHECK(f.body[0].kind == StmtKind::Assign);
  CHECK(f.body[0].value == Expr::integer(0));
  CHECK(f.body[1].kind == StmtKind::Return);
  CHECK(validate(p).ok());
}

TEST_CASE("parse the list traversal") {
  Program p = testutil::corpus("iter.rabc");
  REQUIRE(p.functions.size() == 1);
  const Function& f = p.functions[0];
  CHECK(count_stmts(f.body, StmtKind::Match) == 1);
  CHECK(count_stmts(f.body, StmtKind::Tick) == 2);
  const Stmt& m = f.body[0];
  REQUIRE(m.kind == StmtKind::Match);
  CHECK(m.place == Place::var("l").deref());
  CHECK(m.hd == "h");
  CHECK(m.tl == "t");
  CHECK(m.first[0].amount == 1);
  CHECK(m.second[0].amount == 2);
  CHECK(m.second[1].kind == StmtKind::AssignCall);
  CHECK(m.second[1].callee == "iter");
  CHECK(m.second[1].args[0] == Expr::shared(Place::var("t").deref()));
  CHECK(f.params[0].type == SimpleType::shared(SimpleType::list()));
}

TEST_CASE("parse errors carry position and expectations") {
  try {
    parse("fn f(");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.found == "end of input");
    CHECK(e.pos.line == 1);
    CHECK(e.pos.col == 6);
    CHECK(!e.expected.empty());
  }
  CHECK_THROWS_AS(parse("fn f() -> unit { tick(1) }"), ParseError);
  CHECK_THROWS_AS(parse("fn f() -> unit { x := ; }"), ParseError);
  CHECK_THROWS_AS(parse("fn f() -> unit { let x: i32; if true { } else { }; }"), ParseError);
  // Comparisons do not chain.
  CHECK_THROWS_AS(parse("fn f() -> bool { ret := 1 < 2 < 3; }"), ParseError);
}

TEST_CASE("operator precedence and comments") {
  Program p = parse("// leading\nfn f() -> i32 { ret := 1 + 2 * 3 - 4; // trailing\n }");
  const Expr& e = p.functions[0].body[0].value;
  // (1 + (2 * 3)) - 4
  REQUIRE(e.kind == ExprKind::BinOp);
  CHECK(e.op == BinOpKind::Sub);
  CHECK(e.kids[1] == Expr::integer(4));
  CHECK(e.kids[0].op == BinOpKind::Add);
  CHECK(e.kids[0].kids[1].op == BinOpKind::Mul);
}

TEST_CASE("shared borrow of a mutable borrow is rejected") {
  Program p = parse("fn f(l: & &mut list) -> unit { }");
  ValidationReport r = validate(p);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "shared borrow of mutable borrow"));
}

TEST_CASE("undeclared variables are reported") {
  Program p = parse("fn f() -> i32 { ret := copy y; }");
  ValidationReport r = validate(p);
  CHECK(has_violation(r, "undeclared variable 'y'"));
}

TEST_CASE("validation reports every violation") {
  Program p = parse(
      "fn f(b: i32, l: list) -> unit {\n"
      "  let h: bool;\n"
      "  let t: box list;\n"
      "  return;\n"
      "  if b { } else { };\n"
      "  match l { nil => { }, cons(h, t) => { } };\n"
      "  ret := g(1);\n"
      "  ret := f(1);\n"
      "}");
  ValidationReport r = validate(p);
  CHECK(has_violation(r, "return is only allowed as the last statement"));
  CHECK(has_violation(r, "if condition 'b'"));
  CHECK(has_violation(r, "match binder 'h'"));
  CHECK(has_violation(r, "call to undefined function 'g'"));
  CHECK(has_violation(r, "expects 2"));
  CHECK(r.violations.size() >= 5);
}

TEST_CASE("shape errors in expressions and statements") {
  CHECK_FALSE(validate(parse("fn f(l: list) -> list { ret := copy l; }")).ok());
  CHECK_FALSE(validate(parse("fn f(x: i32) -> unit { match x { nil => { }, cons(h, t) => { } }; }")).ok());
  CHECK_FALSE(validate(parse("fn f(x: i32) -> i32 { ret := copy *x; }")).ok());
  CHECK_FALSE(validate(parse("fn f(x: bool) -> i32 { ret := copy x + 1; }")).ok());
  CHECK_FALSE(validate(parse("fn f(ret: i32) -> i32 { }")).ok());
  CHECK_FALSE(validate(parse("fn f(x: i32, x: i32) -> i32 { }")).ok());
  CHECK_FALSE(validate(parse("fn f() -> i32 { } fn f() -> i32 { }")).ok());
}

TEST_CASE("every corpus program validates") {
  for (const auto& f : testutil::corpus_files()) {
    CAPTURE(f);
    ValidationReport r = validate(testutil::corpus(f));
    CHECK_MESSAGE(r.ok(), r.to_string());
  }
}

TEST_CASE("call graph groups") {
  SUBCASE("mutual recursion forms one group") {
    auto g = call_graph_sccs(testutil::corpus("parity.rabc"));
    REQUIRE(g.size() == 1);
    CHECK(g[0] == std::vector<std::string>{"even_len", "odd_len"});
  }
  SUBCASE("callee before caller") {
    auto g = call_graph_sccs(testutil::corpus("iter_twice.rabc"));
    CHECK(g == std::vector<std::vector<std::string>>{{"iter"}, {"iter_twice"}});
  }
  SUBCASE("independent functions are singletons") {
    auto g = call_graph_sccs(parse("fn a() -> unit { } fn b() -> unit { } fn c() -> unit { }"));
    CHECK(g.size() == 3);
    for (const auto& grp : g) CHECK(grp.size() == 1);
  }
  SUBCASE("callers never precede their callees") {
    for (const auto& file : testutil::corpus_files()) {
      Program p = testutil::corpus(file);
      auto groups = call_graph_sccs(p);
      std::map<std::string, size_t> where;
      for (size_t i = 0; i < groups.size(); ++i)
        for (const auto& n : groups[i]) where[n] = i;
      std::function<void(const std::string&, const std::vector<Stmt>&)> walk =
          [&](const std::string& caller, const std::vector<Stmt>& body) {
            for (const auto& s : body) {
              if (s.kind == StmtKind::AssignCall) CHECK(where.at(s.callee) <= where.at(caller));
              walk(caller, s.first);
              walk(caller, s.second);
            }
          };
      for (const auto& f : p.functions) walk(f.name, f.body);
    }
  }
}

namespace {

// Random, not necessarily well-typed, syntax trees for the printer round trip.
struct AstGen {
  std::mt19937 rng;
  explicit AstGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string ident() {
    static const char* names[] = {"a", "b", "l", "t", "h", "xs", "acc", "tmp"};
    return names[pick(8)];
  }
  Place place() {
    Place p = Place::var(ident());
    p.derefs = static_cast<unsigned>(pick(3));
    return p;
  }
  SimpleType type(int depth = 0) {
    switch (pick(depth > 2 ? 5 : 7)) {
      case 0: return SimpleType::i32();
      case 1: return SimpleType::boolean();
      case 2: return SimpleType::unit();
      case 3: return SimpleType::list();
      case 4: return SimpleType::box_list();
      case 5: return SimpleType::shared(type(depth + 1));
      default: return SimpleType::mut(type(depth + 1));
    }
  }
  Expr expr(int depth = 0) {
    switch (pick(depth > 2 ? 8 : 10)) {
      case 0: return Expr::integer(pick(2001) - 1000);
      case 1: return Expr::boolean(pick(2));
      case 2: return Expr::nil();
      case 3: return Expr::copy(place());
      case 4: return Expr::shared(place());
      case 5: return Expr::mut(place());
      case 6: return Expr::move(place());
      case 7: return Expr::integer(pick(10));
      case 8: return Expr::box(expr(depth + 1));
      default: {
        static const BinOpKind ops[] = {BinOpKind::Add, BinOpKind::Sub, BinOpKind::Mul,
                                        BinOpKind::Lt,  BinOpKind::Le,  BinOpKind::Eq};
        return Expr::binop(ops[pick(6)], expr(depth + 1), expr(depth + 1));
      }
    }
  }
  std::vector<Stmt> block(int depth) {
    std::vector<Stmt> out;
    int n = pick(4);
    for (int i = 0; i < n; ++i) out.push_back(stmt(depth));
    return out;
  }
  Stmt stmt(int depth) {
    switch (pick(depth > 2 ? 5 : 7)) {
      case 0: return Stmt::tick(pick(41) - 20);
      case 1: return Stmt::drop(place());
      case 2: return Stmt::assign(place(), expr());
      case 3: return Stmt::assign_cons(place(), expr(), expr());
      case 4: {
        std::vector<Expr> args;
        for (int i = pick(3); i > 0; --i) args.push_back(expr());
        return Stmt::call(place(), "g" + std::to_string(pick(3)), std::move(args));
      }
      case 5: return Stmt::if_(place(), block(depth + 1), block(depth + 1));
      default: return Stmt::match(place(), block(depth + 1), ident(), ident(), block(depth + 1));
    }
  }
  Function function(int k) {
    Function f;
    f.name = "f" + std::to_string(k);
    for (int i = pick(3); i > 0; --i) f.params.push_back({ident(), type()});
    for (int i = pick(3); i > 0; --i) f.locals.push_back({ident(), type()});
    f.ret_type = type();
    f.body = block(0);
    if (pick(2)) f.body.push_back(Stmt::ret());
    return f;
  }
  Program program() {
    Program p;
    for (int i = pick(4); i > 0; --i) p.functions.push_back(function(i));
    return p;
  }
};

}  // namespace

TEST_CASE("print then parse is the identity") {
  for (const auto& f : testutil::corpus_files()) {
    Program p = testutil::corpus(f);
    CHECK(parse(print(p)) == p);
  }
  AstGen gen(20240611);
  for (int i = 0; i < 500; ++i) {
    Program p = gen.program();
    std::string text = print(p);
    CAPTURE(text);
    Program q;
    REQUIRE_NOTHROW(q = parse(text));
    CHECK(q == p);
    CHECK(print(q) == text);
  }
}
