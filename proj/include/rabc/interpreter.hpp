#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabc/syntax.hpp"

namespace rabc {

// Every activation owns a frame; borrow origins name a place inside a frame.
using FrameId = std::uint32_t;

struct Location {
  FrameId frame = 0;
  Place place;
  bool operator==(const Location& o) const { return frame == o.frame && place == o.place; }
};

class Value {
 public:
  enum class Kind { Undef, Int, Bool, Nil, Cons, Box, Borrow };

  Value() = default;  // undefined
  static Value undef() { return {}; }
  static Value integer(std::int64_t v);
  static Value boolean(bool b);
  static Value nil();
  static Value cons(std::int64_t head, Value tail_box);
  static Value box(Value inner);
  static Value borrow(Location origin, Value payload);
  static Value list(const std::vector<std::int64_t>& elems);

  Kind kind() const { return kind_; }
  bool is_undef() const { return kind_ == Kind::Undef; }
  bool is_list() const { return kind_ == Kind::Nil || kind_ == Kind::Cons; }
  std::int64_t as_int() const { return num_; }  // Int, Cons head
  bool as_bool() const { return num_ != 0; }
  const Value& child() const { return *child_; }  // Cons tail box, Box inner, Borrow payload
  const Location& origin() const { return *origin_; }

  // Elements of a list value, or nullopt if this is not a well-formed list.
  std::optional<std::vector<std::int64_t>> elements() const;
  std::size_t length() const;  // list length; 0 for non-lists

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }

 private:
  Kind kind_ = Kind::Undef;
  std::int64_t num_ = 0;
  std::shared_ptr<const Value> child_;
  std::shared_ptr<const Location> origin_;
};

std::string to_string(const Value& v);

class RuntimeError : public std::runtime_error {
 public:
  enum class Kind {
    UndefRead, Shape, Overflow, FuelExhausted, DepthExceeded, Dangling, UnknownFunction
  };
  RuntimeError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

const char* to_string(RuntimeError::Kind k);

class Store {
 public:
  Store() { frames_[0]; }
  static constexpr FrameId kRoot = 0;

  FrameId push_frame();
  void pop_frame(FrameId f);
  bool has_frame(FrameId f) const { return frames_.count(f) != 0; }

  // Unmapped names read as undefined.
  const Value& get(FrameId f, const std::string& name) const;
  void set(FrameId f, const std::string& name, Value v);
  const std::map<std::string, Value>& frame(FrameId f) const;

 private:
  std::map<FrameId, std::map<std::string, Value>> frames_;
  FrameId next_ = 1;
};

inline constexpr unsigned kMaxOriginDepth = 1024;

// Reads *...*x, following boxes and borrow payloads. The result may be
// undefined; dereferencing an undefined value throws.
Value store_read(const Store& s, FrameId f, const Place& p);
// Writes through boxes and borrows; a write through a borrow updates its
// origin and then the cached payload.
void store_write(Store& s, FrameId f, const Place& p, Value v);

struct TraceEvent {
  const Function* function;
  const Stmt* stmt;
  unsigned depth;
  std::int64_t cost;  // accumulated before this statement
};

struct ExecOptions {
  std::uint64_t fuel = 10'000'000;  // statement steps
  unsigned max_call_depth = 4000;   // exceeding it counts as running out of fuel
  std::function<void(const TraceEvent&)> trace;
};

class Interpreter {
 public:
  Interpreter(const Program& prog, ExecOptions opts = {});

  Store& store() { return store_; }
  std::int64_t cost() const { return cost_; }
  std::uint64_t steps() const { return steps_; }

  Value eval(FrameId f, const Expr& e) const;
  void exec(FrameId f, const Function& fn, const std::vector<Stmt>& body);
  // Runs fn's body in frame f, which already holds the arguments.
  void run_body(FrameId f, const Function& fn);
  // Full call: fresh frame, bind, run, read ret, discard frame.
  Value call(const Function& fn, const std::vector<Value>& args);

 private:
  const Program& prog_;
  ExecOptions opts_;
  Store store_;
  std::int64_t cost_ = 0;
  std::uint64_t steps_ = 0;
  unsigned depth_ = 0;

  void exec_stmt(FrameId f, const Function& fn, const Stmt& s);
};

struct RunResult {
  Value ret;
  std::int64_t cost = 0;
  std::uint64_t steps = 0;
};

// Calls fn with the given argument values from an empty root frame.
RunResult run_function(const Program& prog, const std::string& fn, const std::vector<Value>& args,
                       ExecOptions opts = {});

}  // namespace rabc
