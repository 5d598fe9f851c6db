#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disambig/minifn/ast.hpp"
#include "disambig/minifn/value.hpp"
#include "disambig/mutation.hpp"

namespace disambig::acquisition {

using minifn::FunctionDef;
using minifn::Type;
using minifn::Value;

// Spec detail ladder: signature only, + purpose, + one example, + more.
enum class Variant { S, SP, SP1, SPx };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view s);

struct FunctionalExample {
  std::vector<Value> args;
  std::optional<Value> expected;  // nullopt: any runtime error is expected
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FunctionSpec {
  std::string name;
  std::vector<minifn::Param> params;
  Type return_type;
  std::optional<std::string> purpose;
  std::vector<FunctionalExample> examples;
  std::optional<Variant> variant;

  std::vector<Type> param_types() const;
  std::string signature() const;  // `fn name(p: T, ...) -> T`
  std::string call(const std::vector<Value>& args) const;  // `name(v, ...)`

  // Checks example arity/types and, when variant is set, the ladder rules.
  // Throws SpecError.
  void validate() const;
};

// `.fnspec` text: signature line, optional `"""` purpose block, then
// `>>> name(args)` lines each followed by an expected literal or `!error`.
// Blank lines and `#` comment lines are ignored outside the purpose block.
FunctionSpec parse_fnspec(std::string_view text);
FunctionSpec load_fnspec(const std::filesystem::path& path);
std::string format_fnspec(const FunctionSpec& spec);

// Code-completion prefix: the signature, an opening brace and the purpose
// and examples as a doc block.
std::string build_prompt(const FunctionSpec& spec);

nlohmann::json spec_to_json(const FunctionSpec& spec);
FunctionSpec spec_from_json(const nlohmann::json& j);
nlohmann::json example_to_json(const FunctionalExample& ex);
FunctionalExample example_from_json(const nlohmann::json& j,
                                    const FunctionSpec& spec);

// ---- candidates ----------------------------------------------------------

enum class Origin { Llm, Corpus, Mutant };
std::string_view to_string(Origin o);

struct Candidate {
  std::string id;
  std::string label;   // file stem, `choice-N`, or `<parent>~OP@site`
  std::string source;  // canonical text for mutants
  FunctionDef def;     // typechecked
  Origin origin = Origin::Corpus;
  std::string parent;  // mutants only: parent candidate id
  std::optional<mutation::OperatorId> op;
};

// 16 hex digits of FNV-1a over the canonical printed AST.
std::string candidate_id(const FunctionDef& def);

struct RawSource {
  std::string label;
  std::string text;
};

struct Validation {
  std::vector<Candidate> candidates;
  std::vector<std::string> diagnostics;
};

// Parses, renames to spec.name, typechecks against the spec's signature and
// drops canonical duplicates (first occurrence wins). Order is preserved.
Validation validate_and_dedupe(const std::vector<RawSource>& sources,
                               const FunctionSpec& spec,
                               Origin origin = Origin::Corpus);

// Mutants of every candidate, each parent capped at cap_per_parent and the
// whole batch at global_cap. Mutants equal to an existing candidate or to an
// earlier mutant are skipped.
std::vector<Candidate> make_mutants(const std::vector<Candidate>& parents,
                                    std::size_t cap_per_parent,
                                    std::size_t global_cap);

// ---- providers -----------------------------------------------------------

class ProviderError : public std::runtime_error {
 public:
  enum class Kind { Unreachable, MalformedResponse, AuthFailure };
  ProviderError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ProviderConfig {
  enum class Kind { Offline, Http };
  Kind kind = Kind::Offline;
  std::filesystem::path directory;  // offline
  std::string endpoint;             // http(s)://host[:port]/path
  std::string model;
  std::string api_key_env;          // name of the variable, not the key
  double temperature = 0.8;
  double timeout_seconds = 30.0;
  std::size_t n = 10;
};

inline ProviderConfig offline_provider(std::filesystem::path dir) {
  ProviderConfig p;
  p.directory = std::move(dir);
  return p;
}

// Keys: endpoint, model, api_key_env, temperature, timeout, n; or directory.
ProviderConfig provider_from_json(const nlohmann::json& j);
ProviderConfig load_provider_config(const std::filesystem::path& path);
nlohmann::json provider_to_json(const ProviderConfig& p);

// Offline: up to n `.mfn` files in lexicographic order. HTTP: one completion
// request (retried once on a connection failure or a 5xx); each choice is appended to
// the prompt unless it already holds a whole definition.
std::vector<RawSource> fetch_candidates(const std::string& prompt, std::size_t n,
                                        const ProviderConfig& provider);

// Joins a completion to its prompt and cuts it after the brace that closes
// the function body.
std::string complete_source(std::string_view prompt, std::string_view completion);

}  // namespace disambig::acquisition
