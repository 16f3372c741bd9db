#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "rabc/harness.hpp"
#include "rabc/inference.hpp"

namespace rabc {

// "iter : fn(l: &list(2)) -> unit | 1"
std::string signature_line(const AnalysisResult& an, const std::string& fn, bool current_only = false);

nlohmann::json analysis_json(const AnalysisResult& an, bool current_only = false);
nlohmann::json fit_json(const FitReport& r);

// Solved values keyed by variable name, and the inverse. Unknown names are
// rejected; variables missing from the file keep the solved value.
nlohmann::json assignment_json(const AnalysisResult& an);
Assignment load_assignment(const nlohmann::json& j, const AnalysisResult& an);

// Parses "5", "-3", "true", "false", "[]" or "[1, 2, 3]" as an argument of
// the innermost type of t (reference layers are scaffolded separately).
Value parse_value_literal(const std::string& text, const SimpleType& t);

// Renders a value for display ("()" for a missing unit result).
std::string show_value(const Value& v, const SimpleType& t);

}  // namespace rabc
