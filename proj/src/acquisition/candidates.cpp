#include <cstdio>
#include <unordered_set>

#include "disambig/acquisition.hpp"
#include "disambig/minifn/parser.hpp"
#include "disambig/minifn/printer.hpp"
#include "disambig/minifn/typecheck.hpp"

namespace disambig::acquisition {

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Llm:
      return "llm";
    case Origin::Corpus:
      return "corpus";
    case Origin::Mutant:
      return "mutant";
  }
  return "?";
}

std::string candidate_id(const FunctionDef& def) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : minifn::print(def)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string signature_mismatch(const FunctionDef& def, const FunctionSpec& spec) {
  if (def.params.size() != spec.params.size()) {
    return "takes " + std::to_string(def.params.size()) + " parameters, spec has " +
           std::to_string(spec.params.size());
  }
  for (std::size_t i = 0; i < def.params.size(); ++i) {
    if (!(def.params[i].type == spec.params[i].type)) {
      return "parameter " + std::to_string(i + 1) + " is " +
             def.params[i].type.to_string() + ", spec has " +
             spec.params[i].type.to_string();
    }
  }
  if (!(def.return_type == spec.return_type)) {
    return "returns " + def.return_type.to_string() + ", spec has " +
           spec.return_type.to_string();
  }
  return {};
}

}  // namespace

Validation validate_and_dedupe(const std::vector<RawSource>& sources,
                               const FunctionSpec& spec, Origin origin) {
  Validation out;
  std::unordered_set<std::string> seen;
  for (const auto& src : sources) {
    FunctionDef def;
    try {
      def = minifn::parse(src.text);
    } catch (const minifn::ParseError& e) {
      out.diagnostics.push_back(src.label + ": parse error at " + e.what());
      continue;
    }
    if (auto why = signature_mismatch(def, spec); !why.empty()) {
      out.diagnostics.push_back(src.label + ": signature mismatch: " + why);
      continue;
    }
    if (def.name != spec.name) {
      out.diagnostics.push_back(src.label + ": renamed " + def.name + " to " + spec.name);
      def.name = spec.name;
    }
    try {
      minifn::typecheck(def);
    } catch (const minifn::TypeError& e) {
      out.diagnostics.push_back(src.label + ": type error at " + e.what());
      continue;
    }
    std::string id = candidate_id(def);
    if (!seen.insert(id).second) {
      out.diagnostics.push_back(src.label + ": duplicate of an earlier candidate");
      continue;
    }
    Candidate c;
    c.id = std::move(id);
    c.label = src.label;
    c.source = src.text;
    c.def = std::move(def);
    c.origin = origin;
    out.candidates.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> make_mutants(const std::vector<Candidate>& parents,
                                    std::size_t cap_per_parent,
                                    std::size_t global_cap) {
  std::vector<Candidate> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : parents) seen.insert(p.id);
  for (const auto& p : parents) {
    if (out.size() >= global_cap) break;
    if (!p.def.checked()) continue;  // foreign candidate
    for (auto& m : mutation::mutate_all(p.def, cap_per_parent, p.id)) {
      if (out.size() >= global_cap) break;
      std::string id = candidate_id(m.def);
      if (!seen.insert(id).second) continue;
      Candidate c;
      c.id = std::move(id);
      c.label = p.label + "~" + std::string(mutation::to_string(m.op)) + "@" +
                std::to_string(m.site);
      c.source = minifn::print(m.def);
      c.def = std::move(m.def);
      c.origin = Origin::Mutant;
      c.parent = p.id;
      c.op = m.op;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace disambig::acquisition
