#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disambig/engine.hpp"

namespace disambig::report {

using engine::Report;
using engine::Witness;

// Witnesses inducing the same candidate partition (as a set of sets) are
// duplicates; the one with the smaller SizeScore is kept. The result is in
// ascending SizeScore order.
std::vector<Witness> dedupe_witnesses(std::vector<Witness> ws);

// At most this many behaviour classes are listed per placeholder.
inline constexpr std::size_t kMaxListedClasses = 4;

// One `>>> call` line per witness followed by a `???` placeholder naming the
// observed behaviours. Never prints an expected value.
std::string render_partial_examples(const Report& report);

// "0.0", "error(UserRaised)", "timeout".
std::string outcome_summary(const minifn::Outcome& o);

nlohmann::json witness_to_json(const Witness& w, const acquisition::FunctionSpec& spec);
Witness witness_from_json(const nlohmann::json& j, const acquisition::FunctionSpec& spec);

// Stable keys: spec, candidates, witnesses, diagnostics, meta. Contains
// nothing that depends on wall-clock time or worker count.
nlohmann::json to_json(const Report& report);
std::string to_json_text(const Report& report);  // 2-space indent, newline

}  // namespace disambig::report
