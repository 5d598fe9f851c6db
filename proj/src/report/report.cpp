#include "disambig/report.hpp"

#include <algorithm>

#include "disambig/minifn/value_json.hpp"

namespace disambig::report {

using nlohmann::json;

std::vector<Witness> dedupe_witnesses(std::vector<Witness> ws) {
  std::stable_sort(ws.begin(), ws.end(),
                   [](const Witness& a, const Witness& b) { return a.score < b.score; });
  std::vector<Witness> out;
  std::vector<std::vector<std::vector<std::string>>> keys;
  for (auto& w : ws) {
    auto key = w.classes();
    std::sort(key.begin(), key.end());
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
    keys.push_back(std::move(key));
    out.push_back(std::move(w));
  }
  return out;
}

std::string outcome_summary(const minifn::Outcome& o) { return o.describe(); }

namespace {

// (summary, candidate count) per behaviour class, largest class first.
std::vector<std::pair<std::string, std::size_t>> behaviours(const Witness& w) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& cls : w.classes()) {
    out.emplace_back(outcome_summary(w.partition.at(cls.front())), cls.size());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace

std::string render_partial_examples(const Report& report) {
  const auto& spec = report.spec;
  std::string out = "# " + spec.signature() + "\n";
  const std::size_t n = report.survivors.size();
  const std::string over = " over " + std::to_string(n) + (n == 1 ? " candidate" : " candidates");
  if (report.witnesses.empty()) return out + "# no ambiguous inputs found" + over + "\n";
  const std::size_t k = report.witnesses.size();
  out += "# " + std::to_string(k) + (k == 1 ? " partial example" : " partial examples") + over +
         "; replace each ??? with the intended result\n";
  for (const auto& w : report.witnesses) {
    auto bs = behaviours(w);
    out += ">>> " + spec.call(w.args) + "\n";
    out += "???  # " + std::to_string(bs.size()) + " candidate behavior" +
           (bs.size() == 1 ? "" : "s") + " observed: ";
    for (std::size_t i = 0; i < bs.size() && i < kMaxListedClasses; ++i) {
      if (i > 0) out += ", ";
      out += bs[i].first + " x" + std::to_string(bs[i].second);
    }
    if (bs.size() > kMaxListedClasses) {
      out += ", +" + std::to_string(bs.size() - kMaxListedClasses) + " more";
    }
    out += "\n";
  }
  return out;
}

json witness_to_json(const Witness& w, const acquisition::FunctionSpec& spec) {
  json args = json::array();
  for (const auto& a : w.args) args.push_back(minifn::to_json(a));
  json partition = json::object();
  for (const auto& [id, o] : w.partition) partition[id] = minifn::to_json(o);
  return {{"args", std::move(args)},
          {"call", spec.call(w.args)},
          {"partition", std::move(partition)},
          {"classes", w.classes()},
          {"provenance", std::string(engine::to_string(w.provenance))},
          {"score", {{"total", w.score.total}, {"tiebreak", w.score.tiebreak}}}};
}

Witness witness_from_json(const json& j, const acquisition::FunctionSpec& spec) {
  if (!j.is_object() || !j.contains("args") || !j["args"].is_array()) {
    throw minifn::ValueDecodeError("witness needs an 'args' array");
  }
  const auto& args = j["args"];
  if (args.size() != spec.params.size()) {
    throw minifn::ValueDecodeError("witness has wrong arity");
  }
  Witness w;
  for (std::size_t i = 0; i < args.size(); ++i) {
    w.args.push_back(minifn::value_from_json(args[i], spec.params[i].type));
  }
  if (j.contains("partition")) {
    for (const auto& [id, o] : j["partition"].items()) {
      w.partition.emplace(id, minifn::outcome_from_json(o, spec.return_type));
    }
  }
  w.provenance = j.value("provenance", "fuzz_crash") == "pairwise"
                     ? engine::Provenance::Pairwise
                     : engine::Provenance::FuzzCrash;
  w.score = inputgen::size(w.args);
  return w;
}

json to_json(const Report& report) {
  json candidates = json::array();
  for (const auto& c : report.survivors) {
    json cj = {{"id", c.id},
               {"label", c.label},
               {"origin", std::string(acquisition::to_string(c.origin))},
               {"source", c.source}};
    if (c.origin == acquisition::Origin::Mutant) {
      cj["parent"] = c.parent;
      cj["operator"] = c.op ? std::string(mutation::to_string(*c.op)) : "";
    }
    candidates.push_back(std::move(cj));
  }
  json witnesses = json::array();
  for (const auto& w : report.witnesses) witnesses.push_back(witness_to_json(w, report.spec));
  const auto& k = report.counts;
  json counts = {{"acquired", k.acquired},
                 {"valid", k.valid},
                 {"mutants", k.mutants},
                 {"crash_witnesses", k.crash_witnesses},
                 {"survivors", k.survivors},
                 {"survivors_original", k.survivors_original},
                 {"kept_after_trim", k.kept_after_trim},
                 {"pairwise_witnesses", k.pairwise_witnesses},
                 {"reported", k.reported}};
  return {{"spec", acquisition::spec_to_json(report.spec)},
          {"candidates", std::move(candidates)},
          {"witnesses", std::move(witnesses)},
          {"diagnostics", report.diagnostics},
          {"meta",
           {{"seed", report.config.gen.seed},
            {"config", report.config.to_json()},
            {"counts", std::move(counts)}}}};
}

std::string to_json_text(const Report& report) { return to_json(report).dump(2) + "\n"; }

}  // namespace disambig::report
