#include "rabc/interpreter.hpp"

#include <sstream>

namespace rabc {

Value Value::integer(std::int64_t v) {
  Value out;
  out.kind_ = Kind::Int;
  out.num_ = v;
  return out;
}

Value Value::boolean(bool b) {
  Value out;
  out.kind_ = Kind::Bool;
  out.num_ = b ? 1 : 0;
  return out;
}

Value Value::nil() {
  Value out;
  out.kind_ = Kind::Nil;
  return out;
}

Value Value::cons(std::int64_t head, Value tail_box) {
  Value out;
  out.kind_ = Kind::Cons;
  out.num_ = head;
  out.child_ = std::make_shared<const Value>(std::move(tail_box));
  return out;
}

Value Value::box(Value inner) {
  Value out;
  out.kind_ = Kind::Box;
  out.child_ = std::make_shared<const Value>(std::move(inner));
  return out;
}

Value Value::borrow(Location origin, Value payload) {
  Value out;
  out.kind_ = Kind::Borrow;
  out.child_ = std::make_shared<const Value>(std::move(payload));
  out.origin_ = std::make_shared<const Location>(std::move(origin));
  return out;
}

Value Value::list(const std::vector<std::int64_t>& elems) {
  Value v = nil();
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) v = cons(*it, box(std::move(v)));
  return v;
}

std::optional<std::vector<std::int64_t>> Value::elements() const {
  std::vector<std::int64_t> out;
  const Value* v = this;
  while (v->kind_ == Kind::Cons) {
    out.push_back(v->num_);
    const Value& b = v->child();
    if (b.kind_ != Kind::Box) return std::nullopt;
    v = &b.child();
  }
  if (v->kind_ != Kind::Nil) return std::nullopt;
  return out;
}

std::size_t Value::length() const {
  std::size_t n = 0;
  const Value* v = this;
  while (v->kind_ == Kind::Cons && v->child().kind_ == Kind::Box) {
    ++n;
    v = &v->child().child();
  }
  return n;
}

bool Value::operator==(const Value& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Undef:
    case Kind::Nil: return true;
    case Kind::Int:
    case Kind::Bool: return num_ == o.num_;
    case Kind::Cons: return num_ == o.num_ && child() == o.child();
    case Kind::Box: return child() == o.child();
    case Kind::Borrow: return origin() == o.origin() && child() == o.child();
  }
  return false;
}

std::string to_string(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Undef: return "⊥";
    case Value::Kind::Int: return std::to_string(v.as_int());
    case Value::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Value::Kind::Nil:
    case Value::Kind::Cons: {
      if (auto el = v.elements()) {
        std::string s = "[";
        for (size_t i = 0; i < el->size(); ++i) s += (i ? ", " : "") + std::to_string((*el)[i]);
        return s + "]";
      }
      return "cons(" + std::to_string(v.as_int()) + ", " + to_string(v.child()) + ")";
    }
    case Value::Kind::Box: return "box(" + to_string(v.child()) + ")";
    case Value::Kind::Borrow:
      return "&(" + to_string(v.origin().place) + "@" + std::to_string(v.origin().frame) + ", " +
             to_string(v.child()) + ")";
  }
  return "?";
}

const char* to_string(RuntimeError::Kind k) {
  switch (k) {
    case RuntimeError::Kind::UndefRead: return "undefined-read";
    case RuntimeError::Kind::Shape: return "shape";
    case RuntimeError::Kind::Overflow: return "overflow";
    case RuntimeError::Kind::FuelExhausted: return "fuel-exhausted";
    case RuntimeError::Kind::DepthExceeded: return "depth-exceeded";
    case RuntimeError::Kind::Dangling: return "dangling-borrow";
    case RuntimeError::Kind::UnknownFunction: return "unknown-function";
  }
  return "?";
}

FrameId Store::push_frame() {
  FrameId f = next_++;
  frames_[f];
  return f;
}

void Store::pop_frame(FrameId f) { frames_.erase(f); }

const Value& Store::get(FrameId f, const std::string& name) const {
  static const Value undef;
  auto fr = frames_.find(f);
  if (fr == frames_.end())
    throw RuntimeError(RuntimeError::Kind::Dangling,
                       "read of '" + name + "' in finished frame " + std::to_string(f));
  auto it = fr->second.find(name);
  return it == fr->second.end() ? undef : it->second;
}

void Store::set(FrameId f, const std::string& name, Value v) {
  auto fr = frames_.find(f);
  if (fr == frames_.end())
    throw RuntimeError(RuntimeError::Kind::Dangling,
                       "write of '" + name + "' in finished frame " + std::to_string(f));
  if (v.is_undef()) fr->second.erase(name);
  else fr->second[name] = std::move(v);
}

const std::map<std::string, Value>& Store::frame(FrameId f) const {
  auto fr = frames_.find(f);
  if (fr == frames_.end())
    throw RuntimeError(RuntimeError::Kind::Dangling, "no frame " + std::to_string(f));
  return fr->second;
}

Value store_read(const Store& s, FrameId f, const Place& p) {
  Value v = s.get(f, p.root);
  for (unsigned i = 0; i < p.derefs; ++i) {
    switch (v.kind()) {
      case Value::Kind::Box:
      case Value::Kind::Borrow: {
        Value next = v.child();
        v = std::move(next);
        break;
      }
      case Value::Kind::Undef:
        throw RuntimeError(RuntimeError::Kind::UndefRead,
                           "dereference of undefined '" + to_string(Place{p.root, i}) + "'");
      default:
        throw RuntimeError(RuntimeError::Kind::Shape, "cannot dereference '" +
                                                          to_string(Place{p.root, i}) +
                                                          "' holding " + to_string(v));
    }
  }
  return v;
}

namespace {

void write_at(Store& s, FrameId f, const Place& p, Value v, unsigned depth) {
  if (depth > kMaxOriginDepth)
    throw RuntimeError(RuntimeError::Kind::DepthExceeded, "borrow origin chain deeper than " +
                                                              std::to_string(kMaxOriginDepth));
  if (p.is_var()) {
    s.set(f, p.root, std::move(v));
    return;
  }
  Place parent = p.parent();
  Value pv = store_read(s, f, parent);
  switch (pv.kind()) {
    case Value::Kind::Box:
      write_at(s, f, parent, Value::box(std::move(v)), depth + 1);
      return;
    case Value::Kind::Borrow: {
      Location q = pv.origin();
      write_at(s, q.frame, q.place, v, depth + 1);
      write_at(s, f, parent, Value::borrow(q, std::move(v)), depth + 1);
      return;
    }
    case Value::Kind::Undef:
      throw RuntimeError(RuntimeError::Kind::UndefRead,
                         "write through undefined '" + to_string(parent) + "'");
    default:
      throw RuntimeError(RuntimeError::Kind::Shape,
                         "write through '" + to_string(parent) + "' holding " + to_string(pv));
  }
}

std::int64_t checked(BinOpKind op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool bad = false;
  switch (op) {
    case BinOpKind::Add: bad = __builtin_add_overflow(a, b, &r); break;
    case BinOpKind::Sub: bad = __builtin_sub_overflow(a, b, &r); break;
    case BinOpKind::Mul: bad = __builtin_mul_overflow(a, b, &r); break;
    default: break;
  }
  if (bad)
    throw RuntimeError(RuntimeError::Kind::Overflow, std::to_string(a) + " " + to_string(op) +
                                                         " " + std::to_string(b) +
                                                         " overflows 64 bits");
  return r;
}

Value defined(Value v, const Place& p) {
  if (v.is_undef())
    throw RuntimeError(RuntimeError::Kind::UndefRead, "read of undefined '" + to_string(p) + "'");
  return v;
}

}  // namespace

void store_write(Store& s, FrameId f, const Place& p, Value v) { write_at(s, f, p, std::move(v), 0); }

Interpreter::Interpreter(const Program& prog, ExecOptions opts) : prog_(prog), opts_(std::move(opts)) {}

Value Interpreter::eval(FrameId f, const Expr& e) const {
  switch (e.kind) {
    case ExprKind::Int: return Value::integer(e.value);
    case ExprKind::True: return Value::boolean(true);
    case ExprKind::False: return Value::boolean(false);
    case ExprKind::Nil: return Value::nil();
    case ExprKind::Box: return Value::box(eval(f, e.kids[0]));
    case ExprKind::BinOp: {
      Value l = eval(f, e.kids[0]), r = eval(f, e.kids[1]);
      if (l.kind() != Value::Kind::Int || r.kind() != Value::Kind::Int)
        throw RuntimeError(RuntimeError::Kind::Shape, std::string("operator ") + to_string(e.op) +
                                                          " applied to " + to_string(l) + " and " +
                                                          to_string(r));
      switch (e.op) {
        case BinOpKind::Lt: return Value::boolean(l.as_int() < r.as_int());
        case BinOpKind::Le: return Value::boolean(l.as_int() <= r.as_int());
        case BinOpKind::Eq: return Value::boolean(l.as_int() == r.as_int());
        default: return Value::integer(checked(e.op, l.as_int(), r.as_int()));
      }
    }
    case ExprKind::Copy:
    case ExprKind::Move: return defined(store_read(store_, f, e.place), e.place);
    case ExprKind::Shared:
    case ExprKind::Mut:
      return Value::borrow({f, e.place}, defined(store_read(store_, f, e.place), e.place));
  }
  return {};
}

void Interpreter::exec(FrameId f, const Function& fn, const std::vector<Stmt>& body) {
  for (const auto& s : body) exec_stmt(f, fn, s);
}

void Interpreter::run_body(FrameId f, const Function& fn) { exec(f, fn, fn.body); }

void Interpreter::exec_stmt(FrameId f, const Function& fn, const Stmt& s) {
  if (steps_ >= opts_.fuel)
    throw RuntimeError(RuntimeError::Kind::FuelExhausted,
                       "fuel exhausted after " + std::to_string(opts_.fuel) + " steps");
  ++steps_;
  if (opts_.trace) opts_.trace({&fn, &s, depth_, cost_});
  switch (s.kind) {
    case StmtKind::Tick:
      if (__builtin_add_overflow(cost_, s.amount, &cost_))
        throw RuntimeError(RuntimeError::Kind::Overflow, "accumulated cost overflows 64 bits");
      return;
    case StmtKind::Return:
    case StmtKind::Drop: return;
    case StmtKind::Assign: store_write(store_, f, s.place, eval(f, s.value)); return;
    case StmtKind::AssignCons: {
      Value h = eval(f, s.args[0]);
      Value t = eval(f, s.args[1]);
      if (h.kind() != Value::Kind::Int || t.kind() != Value::Kind::Box)
        throw RuntimeError(RuntimeError::Kind::Shape,
                           "cons of " + to_string(h) + " and " + to_string(t));
      store_write(store_, f, s.place, Value::cons(h.as_int(), std::move(t)));
      return;
    }
    case StmtKind::If: {
      Value c = store_read(store_, f, s.place);
      if (c.kind() != Value::Kind::Bool)
        throw RuntimeError(c.is_undef() ? RuntimeError::Kind::UndefRead : RuntimeError::Kind::Shape,
                           "if condition '" + to_string(s.place) + "' holds " + to_string(c));
      exec(f, fn, c.as_bool() ? s.first : s.second);
      return;
    }
    case StmtKind::Match: {
      Value v = store_read(store_, f, s.place);
      if (v.kind() == Value::Kind::Nil) {
        exec(f, fn, s.first);
        return;
      }
      if (v.kind() != Value::Kind::Cons)
        throw RuntimeError(v.is_undef() ? RuntimeError::Kind::UndefRead : RuntimeError::Kind::Shape,
                           "match scrutinee '" + to_string(s.place) + "' holds " + to_string(v));
      store_write(store_, f, s.place, Value::undef());
      store_.set(f, s.hd, Value::integer(v.as_int()));
      store_.set(f, s.tl, v.child());
      exec(f, fn, s.second);
      Value hd = store_.get(f, s.hd);
      Value tl = store_.get(f, s.tl);
      store_.set(f, s.hd, Value::undef());
      store_.set(f, s.tl, Value::undef());
      if (hd.kind() != Value::Kind::Int || tl.kind() != Value::Kind::Box)
        throw RuntimeError(RuntimeError::Kind::Shape, "match binders hold " + to_string(hd) +
                                                          " and " + to_string(tl) +
                                                          " at the end of the cons arm");
      store_write(store_, f, s.place, Value::cons(hd.as_int(), std::move(tl)));
      return;
    }
    case StmtKind::AssignCall: {
      const Function* callee = prog_.find(s.callee);
      if (!callee)
        throw RuntimeError(RuntimeError::Kind::UnknownFunction, "no function '" + s.callee + "'");
      std::vector<Value> args;
      for (const auto& a : s.args) args.push_back(eval(f, a));
      Value r = call(*callee, args);
      store_write(store_, f, s.place, std::move(r));
      return;
    }
  }
}

Value Interpreter::call(const Function& fn, const std::vector<Value>& args) {
  if (args.size() != fn.params.size())
    throw RuntimeError(RuntimeError::Kind::Shape, "'" + fn.name + "' expects " +
                                                      std::to_string(fn.params.size()) +
                                                      " arguments");
  if (depth_ >= opts_.max_call_depth)
    throw RuntimeError(RuntimeError::Kind::FuelExhausted,
                       "fuel exhausted: call depth limit of " + std::to_string(opts_.max_call_depth) + " reached");
  FrameId g = store_.push_frame();
  for (size_t i = 0; i < args.size(); ++i) store_.set(g, fn.params[i].name, args[i]);
  ++depth_;
  try {
    run_body(g, fn);
  } catch (...) {
    --depth_;
    throw;
  }
  --depth_;
  Value r = store_.get(g, kRetVar);
  store_.pop_frame(g);
  return r;
}

RunResult run_function(const Program& prog, const std::string& name, const std::vector<Value>& args,
                       ExecOptions opts) {
  const Function* fn = prog.find(name);
  if (!fn) throw RuntimeError(RuntimeError::Kind::UnknownFunction, "no function '" + name + "'");
  Interpreter in(prog, std::move(opts));
  RunResult r;
  r.ret = in.call(*fn, args);
  r.cost = in.cost();
  r.steps = in.steps();
  return r;
}

}  // namespace rabc
