#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "disambig/acquisition.hpp"
#include "disambig/inputgen.hpp"
#include "disambig/minifn/interp.hpp"
#include "disambig/minifn/outcome.hpp"

namespace disambig::engine {

using acquisition::Candidate;
using acquisition::FunctionSpec;
using minifn::Outcome;
using minifn::Value;

struct EngineConfig {
  inputgen::GenConfig gen;
  std::uint64_t fuel = minifn::kDefaultFuel;
  bool mutants = true;
  std::size_t mutant_cap_per_parent = mutation::kDefaultCapPerParent;
  std::size_t mutant_global_cap = mutation::kDefaultGlobalCap;
  std::size_t shrink_budget = inputgen::kDefaultShrinkBudget;
  std::size_t workers = 1;  // never affects results

  nlohmann::json to_json() const;  // omits workers
  static EngineConfig from_json(const nlohmann::json& j);
};

// Runs task(i) for i in [0, n) on up to `workers` threads. Tasks write to
// their own slots, so the result does not depend on scheduling.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

// ---- foreign candidates --------------------------------------------------

// A long-lived child process speaking newline-delimited JSON on stdin/stdout.
// A call that does not answer within the timeout yields BudgetExhausted and
// the child is restarted.
class SubprocessRunner {
 public:
  explicit SubprocessRunner(std::vector<std::string> argv, double timeout_seconds = 0.3);
  ~SubprocessRunner();
  SubprocessRunner(const SubprocessRunner&) = delete;
  SubprocessRunner& operator=(const SubprocessRunner&) = delete;

  Outcome call(const std::vector<Value>& args, const minifn::Type& return_type);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---- suggestion space ----------------------------------------------------

struct SuggestionSpace {
  FunctionSpec spec;
  std::vector<Candidate> candidates;
  std::map<std::string, std::shared_ptr<SubprocessRunner>> runners;  // by id

  // A candidate whose behaviour comes from a runner process, not a def.
  void add_foreign(std::string label, std::vector<std::string> argv);
  Outcome evaluate(const Candidate& c, const std::vector<Value>& args,
                   std::uint64_t fuel) const;
};

class EmptySpaceError : public std::runtime_error {
 public:
  EmptySpaceError()
      : std::runtime_error("examples are inconsistent or too strict: no candidate survives") {}
};

// ---- witnesses -----------------------------------------------------------

enum class Provenance { FuzzCrash, Pairwise };
std::string_view to_string(Provenance p);

struct Witness {
  std::vector<Value> args;
  std::map<std::string, Outcome> partition;  // candidate id -> outcome
  inputgen::SizeScore score;
  Provenance provenance = Provenance::FuzzCrash;

  // Candidate ids grouped by outcome_eq, classes ordered by first id.
  std::vector<std::vector<std::string>> classes() const;
  bool nontrivial() const;
};

// Evaluates every candidate of the space on args.
Witness make_witness(const SuggestionSpace& space, std::vector<Value> args,
                     Provenance provenance, std::uint64_t fuel, std::size_t workers = 1);

// The inputs tried per target: the special-value tuples first, then generated
// positions; or the whole input domain when it is no larger than the trial
// count.
std::vector<std::vector<Value>> input_stream(const std::vector<minifn::Type>& types,
                                             const inputgen::GenConfig& gen);

// Outcomes on input_stream, one row per candidate id. Computed once per run
// and shared by the crash fuzzer and the pairwise search.
using StreamOutcomes = std::map<std::string, std::vector<Outcome>>;
StreamOutcomes evaluate_stream(const SuggestionSpace& space,
                               const std::vector<std::vector<Value>>& stream,
                               const EngineConfig& cfg);

// ---- pipeline stages -----------------------------------------------------

// `table`, when given, must hold a row for every candidate.
std::vector<Witness> fuzz_crashes(const SuggestionSpace& space, const EngineConfig& cfg,
                                  const StreamOutcomes* table = nullptr);

// Throws EmptySpaceError when examples exist and nobody passes them.
SuggestionSpace filter_by_examples(const SuggestionSpace& space, const EngineConfig& cfg);
bool satisfies(const SuggestionSpace& space, const Candidate& c,
               const acquisition::FunctionalExample& ex, std::uint64_t fuel);

std::vector<Witness> pairwise_search(const SuggestionSpace& space, const EngineConfig& cfg,
                                     const std::vector<Witness>& known,
                                     const StreamOutcomes* table = nullptr);

// Recomputes partitions on the space and keeps the non-trivial witnesses.
std::vector<Witness> revalidate(const SuggestionSpace& space, const std::vector<Witness>& ws,
                                const EngineConfig& cfg);

struct StageCounts {
  std::size_t acquired = 0;
  std::size_t valid = 0;
  std::size_t mutants = 0;
  std::size_t crash_witnesses = 0;
  std::size_t survivors = 0;
  std::size_t survivors_original = 0;
  std::size_t kept_after_trim = 0;
  std::size_t pairwise_witnesses = 0;
  std::size_t reported = 0;
};

struct Report {
  FunctionSpec spec;
  std::vector<Candidate> survivors;  // the space the witnesses refer to
  std::vector<Witness> witnesses;    // ascending SizeScore
  std::vector<std::string> diagnostics;
  EngineConfig config;
  StageCounts counts;
};

struct PipelineResult {
  Report report;
  SuggestionSpace space;  // survivors, for callers that continue the session
};

// acquisition -> mutation -> fuzz -> trim -> revalidate -> pairwise -> report.
PipelineResult run_pipeline(const FunctionSpec& spec,
                            const acquisition::ProviderConfig& provider,
                            const EngineConfig& cfg);

// From an already-built space (originals and mutants).
PipelineResult run_on_space(const SuggestionSpace& space, const EngineConfig& cfg,
                            StageCounts counts = {}, std::vector<std::string> diagnostics = {});

// Narrows an existing space with the spec's (possibly new) examples and
// searches again; earlier witnesses are revalidated and reused.
PipelineResult refine(const SuggestionSpace& space, const FunctionSpec& spec,
                      const std::vector<Witness>& previous, const EngineConfig& cfg);

}  // namespace disambig::engine
