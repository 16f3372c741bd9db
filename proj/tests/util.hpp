#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rabc/syntax.hpp"

namespace testutil {

inline std::string corpus_path(const std::string& name) { return std::string(RABC_CORPUS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline rabc::Program corpus(const std::string& name) { return rabc::parse(read_text(corpus_path(name))); }

inline const std::vector<std::string>& corpus_files() {
  static const std::vector<std::string> files = {
      "iter.rabc",   "iter_twice.rabc", "update.rabc",     "prophecy.rabc",   "weak.rabc",
      "sum.rabc",    "rev.rabc",        "dup.rabc",        "append.rabc",     "end_m.rabc",
      "end_c.rabc",  "reborrow_s.rabc", "reborrow_m.rabc", "nested.rabc",     "branch.rabc",
      "parity.rabc"};
  return files;
}

}  // namespace testutil
