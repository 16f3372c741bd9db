#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rabc/annotations.hpp"
#include "rabc/inference.hpp"
#include "rabc/interpreter.hpp"

namespace rabc {

// Potential of a value under an annotated type. Undefined values carry none.
Rational potential(const Value& v, const RType& t, const Assignment& a);
// Sum over the names typed by g.
Rational potential_store(const Store& s, FrameId f, const Context& g, const Assignment& a);

// Argument values for a call from the root frame. For a reference
// parameter the referent lives in hidden root slots (one per reference
// level) and the argument borrows it. `base` holds the innermost values.
std::vector<Value> scaffold_args(Store& s, const Function& fn, const std::vector<Value>& base);

// Innermost argument values for size n: every list-bearing parameter gets
// [1..n], i32 parameters get n/2, bool parameters get (n is even).
std::vector<Value> generate_inputs(const Function& fn, std::size_t n);

struct SoundnessReport {
  std::int64_t cost = 0;
  Rational phi_in, phi_out, delta;
  Rational slack;  // delta - (phi_out - phi_in + cost)
  bool ok() const { return slack >= 0; }
};

// Runs fn's body once on scaffolded arguments and compares the measured
// cost against the potential difference and the inferred constant.
SoundnessReport check_soundness(const Program& prog, const AnalysisResult& an,
                                const std::string& fn, const std::vector<Value>& base,
                                const Assignment& a, ExecOptions opts = {});

// Per-element coefficient of a parameter type: lists count their
// annotation, mutable borrows count current minus prophecy.
Rational per_element(const RType& t, const Assignment& a);

struct FitReport {
  std::string fn;
  std::vector<std::size_t> sizes;
  std::vector<std::int64_t> costs;
  std::vector<Rational> bounds;  // delta + coeff * n
  std::vector<Rational> soundness_slack;
  Rational constant, coeff;
  Rational slack_max;
  bool sound = true;  // soundness slack >= 0 and cost <= bound at every size
  bool tight = true;  // bound - cost is the same at every size
};

FitReport measure_and_fit(const Program& prog, const AnalysisResult& an, const std::string& fn,
                          std::size_t lo, std::size_t hi, const Assignment& a,
                          ExecOptions opts = {});

}  // namespace rabc
