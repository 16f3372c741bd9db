#include "rabc/syntax.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace rabc {

SimpleType SimpleType::shared(SimpleType t) {
  return {TypeKind::SharedRef, std::make_shared<const SimpleType>(std::move(t))};
}

SimpleType SimpleType::mut(SimpleType t) {
  return {TypeKind::MutRef, std::make_shared<const SimpleType>(std::move(t))};
}

bool SimpleType::operator==(const SimpleType& o) const {
  if (kind != o.kind) return false;
  if (!is_ref()) return true;
  return *inner == *o.inner;
}

std::string to_string(const SimpleType& t) {
  switch (t.kind) {
    case TypeKind::I32: return "i32";
    case TypeKind::Bool: return "bool";
    case TypeKind::Unit: return "unit";
    case TypeKind::List: return "list";
    case TypeKind::BoxList: return "box list";
    case TypeKind::SharedRef: return "&" + to_string(*t.inner);
    case TypeKind::MutRef: return "&mut " + to_string(*t.inner);
  }
  return "?";
}

std::string to_string(const Place& p) { return std::string(p.derefs, '*') + p.root; }

const char* to_string(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Le: return "<=";
    case BinOpKind::Eq: return "==";
  }
  return "?";
}

bool is_comparison(BinOpKind op) {
  return op == BinOpKind::Lt || op == BinOpKind::Le || op == BinOpKind::Eq;
}

Expr Expr::box(Expr inner) {
  Expr e;
  e.kind = ExprKind::Box;
  e.kids.push_back(std::move(inner));
  return e;
}

Expr Expr::binop(BinOpKind op, Expr l, Expr r) {
  Expr e;
  e.kind = ExprKind::BinOp;
  e.op = op;
  e.kids.push_back(std::move(l));
  e.kids.push_back(std::move(r));
  return e;
}

Expr Expr::with_place(ExprKind k, Place p) {
  Expr e;
  e.kind = k;
  e.place = std::move(p);
  return e;
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case ExprKind::Int: return value == o.value;
    case ExprKind::True:
    case ExprKind::False:
    case ExprKind::Nil: return true;
    case ExprKind::Box: return kids == o.kids;
    case ExprKind::BinOp: return op == o.op && kids == o.kids;
    default: return place == o.place;
  }
}

Stmt Stmt::tick(std::int64_t n) {
  Stmt s;
  s.kind = StmtKind::Tick;
  s.amount = n;
  return s;
}

Stmt Stmt::ret() { return Stmt{}; }

Stmt Stmt::drop(Place p) {
  Stmt s;
  s.kind = StmtKind::Drop;
  s.place = std::move(p);
  return s;
}

Stmt Stmt::if_(Place p, std::vector<Stmt> then_b, std::vector<Stmt> else_b) {
  Stmt s;
  s.kind = StmtKind::If;
  s.place = std::move(p);
  s.first = std::move(then_b);
  s.second = std::move(else_b);
  return s;
}

Stmt Stmt::match(Place p, std::vector<Stmt> nil_arm, std::string hd, std::string tl,
                 std::vector<Stmt> cons_arm) {
  Stmt s;
  s.kind = StmtKind::Match;
  s.place = std::move(p);
  s.first = std::move(nil_arm);
  s.hd = std::move(hd);
  s.tl = std::move(tl);
  s.second = std::move(cons_arm);
  return s;
}

Stmt Stmt::assign(Place p, Expr e) {
  Stmt s;
  s.kind = StmtKind::Assign;
  s.place = std::move(p);
  s.value = std::move(e);
  return s;
}

Stmt Stmt::assign_cons(Place p, Expr head, Expr tail) {
  Stmt s;
  s.kind = StmtKind::AssignCons;
  s.place = std::move(p);
  s.args.push_back(std::move(head));
  s.args.push_back(std::move(tail));
  return s;
}

Stmt Stmt::call(Place p, std::string fn, std::vector<Expr> args) {
  Stmt s;
  s.kind = StmtKind::AssignCall;
  s.place = std::move(p);
  s.callee = std::move(fn);
  s.args = std::move(args);
  return s;
}

bool Stmt::operator==(const Stmt& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case StmtKind::Tick: return amount == o.amount;
    case StmtKind::Return: return true;
    case StmtKind::Drop: return place == o.place;
    case StmtKind::If: return place == o.place && first == o.first && second == o.second;
    case StmtKind::Match:
      return place == o.place && first == o.first && second == o.second && hd == o.hd &&
             tl == o.tl;
    case StmtKind::Assign: return place == o.place && value == o.value;
    case StmtKind::AssignCons: return place == o.place && args == o.args;
    case StmtKind::AssignCall: return place == o.place && callee == o.callee && args == o.args;
  }
  return false;
}

bool Function::operator==(const Function& o) const {
  return name == o.name && params == o.params && ret_type == o.ret_type &&
         locals == o.locals && body == o.body;
}

const SimpleType* Function::lookup(const std::string& n) const {
  if (n == kRetVar) return &ret_type;
  for (const auto& b : params)
    if (b.name == n) return &b.type;
  for (const auto& b : locals)
    if (b.name == n) return &b.type;
  return nullptr;
}

const Function* Program::find(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

static std::string join_expected(const std::vector<std::string>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

ParseError::ParseError(SrcPos p, std::vector<std::string> exp, std::string fnd)
    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) +
                         ": expected one of {" + join_expected(exp) + "}, found " + fnd),
      pos(p),
      expected(std::move(exp)),
      found(std::move(fnd)) {}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok {
  Ident, Int, End,
  // keywords
  Fn, Let, I32, Bool, List, Box, Unit, Mut, Tick, Return, Drop, If, Else, Match, Nil, Cons,
  True, False, Copy, Move,
  // punctuation
  LParen, RParen, LBrace, RBrace, Comma, Semi, Colon, Arrow, Assign, FatArrow, Amp, Star,
  Plus, Minus, Lt, Le, EqEq,
};

struct Token {
  Tok kind;
  std::string text;
  SrcPos pos;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::End: return "end of input";
    case Tok::Fn: return "'fn'";
    case Tok::Let: return "'let'";
    case Tok::I32: return "'i32'";
    case Tok::Bool: return "'bool'";
    case Tok::List: return "'list'";
    case Tok::Box: return "'box'";
    case Tok::Unit: return "'unit'";
    case Tok::Mut: return "'mut'";
    case Tok::Tick: return "'tick'";
    case Tok::Return: return "'return'";
    case Tok::Drop: return "'drop'";
    case Tok::If: return "'if'";
    case Tok::Else: return "'else'";
    case Tok::Match: return "'match'";
    case Tok::Nil: return "'nil'";
    case Tok::Cons: return "'cons'";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Copy: return "'copy'";
    case Tok::Move: return "'move'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::Assign: return "':='";
    case Tok::FatArrow: return "'=>'";
    case Tok::Amp: return "'&'";
    case Tok::Star: return "'*'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::EqEq: return "'=='";
  }
  return "?";
}

const std::pair<const char*, Tok> kKeywords[] = {
    {"fn", Tok::Fn},         {"let", Tok::Let},       {"i32", Tok::I32},
    {"bool", Tok::Bool},     {"list", Tok::List},     {"box", Tok::Box},
    {"unit", Tok::Unit},     {"mut", Tok::Mut},       {"tick", Tok::Tick},
    {"return", Tok::Return}, {"drop", Tok::Drop},     {"if", Tok::If},
    {"else", Tok::Else},     {"match", Tok::Match},   {"nil", Tok::Nil},
    {"cons", Tok::Cons},     {"true", Tok::True},     {"false", Tok::False},
    {"copy", Tok::Copy},     {"move", Tok::Move},
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SrcPos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      std::string word = src.substr(i, j - i);
      Tok kind = Tok::Ident;
      for (const auto& [kw, t] : kKeywords)
        if (word == kw) kind = t;
      out.push_back({kind, word, pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, src.substr(i, j - i), pos});
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    Tok kind;
    size_t len = 1;
    if (two('-', '>')) kind = Tok::Arrow, len = 2;
    else if (two(':', '=')) kind = Tok::Assign, len = 2;
    else if (two('=', '>')) kind = Tok::FatArrow, len = 2;
    else if (two('<', '=')) kind = Tok::Le, len = 2;
    else if (two('=', '=')) kind = Tok::EqEq, len = 2;
    else {
      switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case ',': kind = Tok::Comma; break;
        case ';': kind = Tok::Semi; break;
        case ':': kind = Tok::Colon; break;
        case '&': kind = Tok::Amp; break;
        case '*': kind = Tok::Star; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '<': kind = Tok::Lt; break;
        default:
          throw ParseError(pos, {"token"}, std::string("'") + c + "'");
      }
    }
    out.push_back({kind, src.substr(i, len), pos});
    advance(len);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) {
      if (peek().kind != Tok::Fn) fail({Tok::Fn, Tok::End});
      p.functions.push_back(function());
    }
    return p;
  }

 private:
  std::vector<Token> toks_;
  size_t at_ = 0;

  const Token& peek(size_t k = 0) const { return toks_[std::min(at_ + k, toks_.size() - 1)]; }

  [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
    std::vector<std::string> names;
    for (Tok t : expected) names.emplace_back(tok_name(t));
    fail_names(std::move(names));
  }

  [[noreturn]] void fail_names(std::vector<std::string> names) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos, std::move(names), found);
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) fail({k});
    return toks_[at_++];
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++at_;
    return true;
  }

  Function function() {
    Function f;
    f.pos = expect(Tok::Fn).pos;
    f.name = expect(Tok::Ident).text;
    expect(Tok::LParen);
    if (peek().kind != Tok::RParen) {
      do {
        Binding b;
        b.name = expect(Tok::Ident).text;
        expect(Tok::Colon);
        b.type = type();
        f.params.push_back(std::move(b));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    expect(Tok::Arrow);
    f.ret_type = type();
    f.body = block(&f.locals);
    return f;
  }

  SimpleType type() {
    switch (peek().kind) {
      case Tok::I32: ++at_; return SimpleType::i32();
      case Tok::Bool: ++at_; return SimpleType::boolean();
      case Tok::Unit: ++at_; return SimpleType::unit();
      case Tok::List: ++at_; return SimpleType::list();
      case Tok::Box:
        ++at_;
        expect(Tok::List);
        return SimpleType::box_list();
      case Tok::Amp:
        ++at_;
        if (accept(Tok::Mut)) return SimpleType::mut(type());
        return SimpleType::shared(type());
      default:
        fail({Tok::I32, Tok::Bool, Tok::Unit, Tok::List, Tok::Box, Tok::Amp});
    }
  }

  // Declarations are accepted only when `locals` is non-null (function body).
  std::vector<Stmt> block(std::vector<Binding>* locals) {
    expect(Tok::LBrace);
    if (locals) {
      while (accept(Tok::Let)) {
        Binding b;
        b.name = expect(Tok::Ident).text;
        expect(Tok::Colon);
        b.type = type();
        expect(Tok::Semi);
        locals->push_back(std::move(b));
      }
    }
    std::vector<Stmt> out;
    while (peek().kind != Tok::RBrace) {
      out.push_back(stmt(locals != nullptr));
      expect(Tok::Semi);
    }
    expect(Tok::RBrace);
    return out;
  }

  Place place() {
    unsigned derefs = 0;
    while (accept(Tok::Star)) ++derefs;
    if (peek().kind != Tok::Ident) fail({Tok::Star, Tok::Ident});
    return {toks_[at_++].text, derefs};
  }

  std::int64_t integer(bool negative) {
    const Token& t = expect(Tok::Int);
    std::int64_t v = 0;
    std::string digits = (negative ? "-" : "") + t.text;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
      throw ParseError(t.pos, {"64-bit integer"}, "'" + digits + "'");
    return v;
  }

  Stmt stmt(bool top_level) {
    const Token& start = peek();
    SrcPos pos = start.pos;
    Stmt s;
    switch (start.kind) {
      case Tok::Tick: {
        ++at_;
        expect(Tok::LParen);
        bool neg = accept(Tok::Minus);
        s = Stmt::tick(integer(neg));
        expect(Tok::RParen);
        break;
      }
      case Tok::Return:
        ++at_;
        s = Stmt::ret();
        break;
      case Tok::Drop:
        ++at_;
        s = Stmt::drop(place());
        break;
      case Tok::If: {
        ++at_;
        Place p = place();
        auto then_b = block(nullptr);
        expect(Tok::Else);
        auto else_b = block(nullptr);
        s = Stmt::if_(std::move(p), std::move(then_b), std::move(else_b));
        break;
      }
      case Tok::Match: {
        ++at_;
        Place p = place();
        expect(Tok::LBrace);
        expect(Tok::Nil);
        expect(Tok::FatArrow);
        auto nil_arm = block(nullptr);
        expect(Tok::Comma);
        expect(Tok::Cons);
        expect(Tok::LParen);
        std::string hd = expect(Tok::Ident).text;
        expect(Tok::Comma);
        std::string tl = expect(Tok::Ident).text;
        expect(Tok::RParen);
        expect(Tok::FatArrow);
        auto cons_arm = block(nullptr);
        expect(Tok::RBrace);
        s = Stmt::match(std::move(p), std::move(nil_arm), std::move(hd), std::move(tl),
                        std::move(cons_arm));
        break;
      }
      case Tok::Star:
      case Tok::Ident: {
        Place p = place();
        expect(Tok::Assign);
        if (peek().kind == Tok::Cons) {
          ++at_;
          expect(Tok::LParen);
          Expr h = expr();
          expect(Tok::Comma);
          Expr t = expr();
          expect(Tok::RParen);
          s = Stmt::assign_cons(std::move(p), std::move(h), std::move(t));
        } else if (peek().kind == Tok::Ident) {
          std::string fn = toks_[at_++].text;
          expect(Tok::LParen);
          std::vector<Expr> args;
          if (peek().kind != Tok::RParen) {
            do args.push_back(expr());
            while (accept(Tok::Comma));
          }
          expect(Tok::RParen);
          s = Stmt::call(std::move(p), std::move(fn), std::move(args));
        } else {
          s = Stmt::assign(std::move(p), expr());
        }
        break;
      }
      case Tok::Let:
        if (!top_level)
          fail_names({"statement (declarations are only allowed at the top of a function body)"});
        [[fallthrough]];
      default:
        fail({Tok::Tick, Tok::Return, Tok::Drop, Tok::If, Tok::Match, Tok::Star, Tok::Ident,
              Tok::RBrace});
    }
    s.pos = pos;
    return s;
  }

  Expr expr() {
    Expr lhs = sum();
    BinOpKind op;
    switch (peek().kind) {
      case Tok::Lt: op = BinOpKind::Lt; break;
      case Tok::Le: op = BinOpKind::Le; break;
      case Tok::EqEq: op = BinOpKind::Eq; break;
      default: return lhs;
    }
    SrcPos pos = toks_[at_++].pos;
    Expr e = Expr::binop(op, std::move(lhs), sum());
    e.pos = pos;
    return e;
  }

  Expr sum() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      BinOpKind op = peek().kind == Tok::Plus ? BinOpKind::Add : BinOpKind::Sub;
      SrcPos pos = toks_[at_++].pos;
      lhs = Expr::binop(op, std::move(lhs), term());
      lhs.pos = pos;
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = primary();
    while (peek().kind == Tok::Star) {
      SrcPos pos = toks_[at_++].pos;
      lhs = Expr::binop(BinOpKind::Mul, std::move(lhs), primary());
      lhs.pos = pos;
    }
    return lhs;
  }

  Expr primary() {
    SrcPos pos = peek().pos;
    Expr e;
    switch (peek().kind) {
      case Tok::Int: e = Expr::integer(integer(false)); break;
      case Tok::Minus:
        ++at_;
        e = Expr::integer(integer(true));
        break;
      case Tok::True: ++at_; e = Expr::boolean(true); break;
      case Tok::False: ++at_; e = Expr::boolean(false); break;
      case Tok::Nil: ++at_; e = Expr::nil(); break;
      case Tok::Box:
        ++at_;
        expect(Tok::LParen);
        e = Expr::box(expr());
        expect(Tok::RParen);
        break;
      case Tok::Copy: ++at_; e = Expr::copy(place()); break;
      case Tok::Move: ++at_; e = Expr::move(place()); break;
      case Tok::Amp:
        ++at_;
        if (accept(Tok::Mut)) e = Expr::mut(place());
        else e = Expr::shared(place());
        break;
      case Tok::LParen:
        ++at_;
        e = expr();
        expect(Tok::RParen);
        return e;
      default:
        fail({Tok::Int, Tok::Minus, Tok::True, Tok::False, Tok::Nil, Tok::Box, Tok::Copy,
              Tok::Move, Tok::Amp, Tok::LParen});
    }
    e.pos = pos;
    return e;
  }
};

// ---------------------------------------------------------------- printer

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int: os << e.value; break;
    case ExprKind::True: os << "true"; break;
    case ExprKind::False: os << "false"; break;
    case ExprKind::Nil: os << "nil"; break;
    case ExprKind::Box:
      os << "box(";
      print_expr(os, e.kids[0]);
      os << ")";
      break;
    case ExprKind::BinOp:
      for (int i = 0; i < 2; ++i) {
        bool paren = e.kids[i].kind == ExprKind::BinOp;
        if (paren) os << "(";
        print_expr(os, e.kids[i]);
        if (paren) os << ")";
        if (i == 0) os << " " << to_string(e.op) << " ";
      }
      break;
    case ExprKind::Copy: os << "copy " << to_string(e.place); break;
    case ExprKind::Move: os << "move " << to_string(e.place); break;
    case ExprKind::Shared: os << "&" << to_string(e.place); break;
    case ExprKind::Mut: os << "&mut " << to_string(e.place); break;
  }
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  std::string pad(indent, ' ');
  os << pad;
  switch (s.kind) {
    case StmtKind::Tick: os << "tick(" << s.amount << ")"; break;
    case StmtKind::Return: os << "return"; break;
    case StmtKind::Drop: os << "drop " << to_string(s.place); break;
    case StmtKind::If:
      os << "if " << to_string(s.place) << " ";
      print_block(os, s.first, indent);
      os << " else ";
      print_block(os, s.second, indent);
      break;
    case StmtKind::Match:
      os << "match " << to_string(s.place) << " {\n" << pad << "  nil => ";
      print_block(os, s.first, indent + 2);
      os << ",\n" << pad << "  cons(" << s.hd << ", " << s.tl << ") => ";
      print_block(os, s.second, indent + 2);
      os << "\n" << pad << "}";
      break;
    case StmtKind::Assign:
      os << to_string(s.place) << " := ";
      print_expr(os, s.value);
      break;
    case StmtKind::AssignCons:
      os << to_string(s.place) << " := cons(";
      print_expr(os, s.args[0]);
      os << ", ";
      print_expr(os, s.args[1]);
      os << ")";
      break;
    case StmtKind::AssignCall:
      os << to_string(s.place) << " := " << s.callee << "(";
      for (size_t i = 0; i < s.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, s.args[i]);
      }
      os << ")";
      break;
  }
  os << ";\n";
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent) {
  os << "{\n";
  for (const auto& s : body) print_stmt(os, s, indent + 2);
  os << std::string(indent, ' ') << "}";
}

}  // namespace

Program parse(const std::string& source) { return Parser(lex(source)).program(); }

std::string print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string print(const Function& f) {
  std::ostringstream os;
  os << "fn " << f.name << "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i) os << ", ";
    os << f.params[i].name << ": " << to_string(f.params[i].type);
  }
  os << ") -> " << to_string(f.ret_type) << " {\n";
  for (const auto& l : f.locals) os << "  let " << l.name << ": " << to_string(l.type) << ";\n";
  for (const auto& s : f.body) print_stmt(os, s, 2);
  os << "}\n";
  return os.str();
}

std::string print(const Program& p) {
  std::string out;
  for (size_t i = 0; i < p.functions.size(); ++i) {
    if (i) out += "\n";
    out += print(p.functions[i]);
  }
  return out;
}

}  // namespace rabc
