#pragma once

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "disambig/acquisition.hpp"
#include "disambig/minifn/parser.hpp"
#include "disambig/minifn/typecheck.hpp"

namespace disambig::testing {

inline std::filesystem::path source_dir() { return DISAMBIG_SOURCE_DIR; }
inline std::filesystem::path fixtures() { return source_dir() / "tests" / "fixtures"; }
inline std::filesystem::path bench_dir() { return source_dir() / "data" / "bench"; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline minifn::FunctionDef checked(std::string_view src) {
  auto def = minifn::parse(src);
  minifn::typecheck(def);
  return def;
}

inline acquisition::Candidate candidate(const std::string& label, std::string_view src) {
  acquisition::Candidate c;
  c.def = checked(src);
  c.source = std::string(src);
  c.label = label;
  c.id = acquisition::candidate_id(c.def);
  return c;
}

// One golden program: the source plus `# (args) => outcome` lines.
struct GoldenCall {
  std::string args;
  std::string expected;  // Outcome::describe() text
};

struct GoldenProgram {
  std::string name;
  std::string source;
  std::uint64_t fuel = 100000;
  std::vector<GoldenCall> calls;
};

inline std::vector<GoldenProgram> load_golden() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(fixtures() / "golden")) {
    if (e.path().extension() == ".mfn") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<GoldenProgram> out;
  for (const auto& f : files) {
    GoldenProgram g;
    g.name = f.stem().string();
    g.source = slurp(f);
    std::istringstream lines(g.source);
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind("# fuel: ", 0) == 0) {
        g.fuel = std::stoull(line.substr(8));
      } else if (line.rfind("# (", 0) == 0) {
        auto close = line.find(") => ");
        g.calls.push_back({line.substr(3, close - 3), line.substr(close + 5)});
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

// Number of maximal subtrees in which two definitions differ: 1 for a mutant
// that rewrote exactly one node.
inline int differing_sites(const minifn::Expr& a, const minifn::Expr& b) {
  bool same_node = a.kind == b.kind && a.int_value == b.int_value &&
                   std::bit_cast<std::uint64_t>(a.float_value) ==
                       std::bit_cast<std::uint64_t>(b.float_value) &&
                   a.bool_value == b.bool_value && a.text == b.text &&
                   a.binary_op == b.binary_op && a.unary_op == b.unary_op &&
                   a.builtin == b.builtin && a.operands.size() == b.operands.size();
  if (!same_node) return 1;
  int n = 0;
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    n += differing_sites(a.operands[i], b.operands[i]);
  }
  return n;
}

inline int differing_sites(const minifn::Block& a, const minifn::Block& b);

inline int differing_sites(const minifn::Stmt& a, const minifn::Stmt& b) {
  if (a.kind != b.kind || a.name != b.name || a.annotation != b.annotation ||
      a.body.size() != b.body.size() || a.else_body.size() != b.else_body.size()) {
    return 1;
  }
  return differing_sites(a.expr, b.expr) + differing_sites(a.body, b.body) +
         differing_sites(a.else_body, b.else_body);
}

inline int differing_sites(const minifn::Block& a, const minifn::Block& b) {
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += differing_sites(a[i], b[i]);
  return n;
}

inline int differing_sites(const minifn::FunctionDef& a, const minifn::FunctionDef& b) {
  if (a.body.size() != b.body.size()) return 1;
  return differing_sites(a.body, b.body);
}

}  // namespace disambig::testing
