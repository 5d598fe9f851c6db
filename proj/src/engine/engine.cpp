#include "disambig/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "disambig/minifn/interp.hpp"
#include "disambig/report.hpp"

namespace disambig::engine {

using minifn::Type;
using nlohmann::json;

json EngineConfig::to_json() const {
  return {{"seed", gen.seed},
          {"max_list_len", gen.max_list_len},
          {"max_str_len", gen.max_str_len},
          {"int_min", gen.int_min},
          {"int_max", gen.int_max},
          {"trials", gen.trials_per_target},
          {"special_value_bias", gen.special_value_bias},
          {"fuel", fuel},
          {"mutants", mutants},
          {"mutant_cap", mutant_cap_per_parent},
          {"mutant_global_cap", mutant_global_cap},
          {"shrink_budget", shrink_budget}};
}

EngineConfig EngineConfig::from_json(const json& j) {
  EngineConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    c.gen.seed = j.value("seed", c.gen.seed);
    c.gen.max_list_len = j.value("max_list_len", c.gen.max_list_len);
    c.gen.max_str_len = j.value("max_str_len", c.gen.max_str_len);
    c.gen.int_min = j.value("int_min", c.gen.int_min);
    c.gen.int_max = j.value("int_max", c.gen.int_max);
    c.gen.trials_per_target = j.value("trials", c.gen.trials_per_target);
    c.gen.special_value_bias = j.value("special_value_bias", c.gen.special_value_bias);
    c.fuel = j.value("fuel", c.fuel);
    c.mutants = j.value("mutants", c.mutants);
    c.mutant_cap_per_parent = j.value("mutant_cap", c.mutant_cap_per_parent);
    c.mutant_global_cap = j.value("mutant_global_cap", c.mutant_global_cap);
    c.shrink_budget = j.value("shrink_budget", c.shrink_budget);
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.gen.validate();
  if (c.fuel == 0) throw std::invalid_argument("fuel must be positive");
  return c;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---- space ---------------------------------------------------------------

void SuggestionSpace::add_foreign(std::string label, std::vector<std::string> argv) {
  Candidate c;
  std::string joined;
  for (const auto& a : argv) joined += a + '\x1f';
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : "runner\x1f" + joined) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  c.id = buf;
  c.label = std::move(label);
  for (const auto& a : argv) c.source += (c.source.empty() ? "" : " ") + a;
  c.def.name = spec.name;
  c.def.params = spec.params;
  c.def.return_type = spec.return_type;
  c.origin = acquisition::Origin::Corpus;
  runners[c.id] = std::make_shared<SubprocessRunner>(std::move(argv));
  candidates.push_back(std::move(c));
}

Outcome SuggestionSpace::evaluate(const Candidate& c, const std::vector<Value>& args,
                                  std::uint64_t fuel) const {
  if (!c.def.checked()) {
    auto it = runners.find(c.id);
    if (it == runners.end()) {
      throw std::logic_error("candidate " + c.label + " has neither a def nor a runner");
    }
    return it->second->call(args, spec.return_type);
  }
  return minifn::eval_call(c.def, args, fuel);
}

// ---- witnesses -----------------------------------------------------------

std::string_view to_string(Provenance p) {
  return p == Provenance::FuzzCrash ? "fuzz_crash" : "pairwise";
}

std::vector<std::vector<std::string>> Witness::classes() const {
  std::vector<std::vector<std::string>> out;
  std::vector<const Outcome*> reps;
  for (const auto& [id, outcome] : partition) {
    std::size_t k = 0;
    while (k < reps.size() && !minifn::outcome_eq(*reps[k], outcome)) ++k;
    if (k == reps.size()) {
      reps.push_back(&outcome);
      out.emplace_back();
    }
    out[k].push_back(id);
  }
  return out;
}

bool Witness::nontrivial() const {
  for (const auto& [id, outcome] : partition) {
    if (outcome.is_failure()) return true;
  }
  return classes().size() >= 2;
}

Witness make_witness(const SuggestionSpace& space, std::vector<Value> args,
                     Provenance provenance, std::uint64_t fuel, std::size_t workers) {
  std::vector<Outcome> outcomes(space.candidates.size(), Outcome::exhausted());
  parallel_for(space.candidates.size(), workers, [&](std::size_t i) {
    outcomes[i] = space.evaluate(space.candidates[i], args, fuel);
  });
  Witness w;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    w.partition.emplace(space.candidates[i].id, std::move(outcomes[i]));
  }
  w.score = inputgen::size(args);
  w.args = std::move(args);
  w.provenance = provenance;
  return w;
}

std::vector<std::vector<Value>> input_stream(const std::vector<Type>& types,
                                             const inputgen::GenConfig& gen) {
  const std::size_t trials = gen.trials_per_target;
  if (auto dom = inputgen::enumerate_domain(types, gen, trials)) return std::move(*dom);

  // Special tuples in odometer order (last parameter fastest), up to a
  // quarter of the trials.
  std::vector<std::vector<Value>> pools;
  for (const auto& t : types) pools.push_back(inputgen::special_values(t));
  std::vector<std::vector<Value>> out;
  const std::size_t prefix_cap = std::max<std::size_t>(1, trials / 4);
  std::size_t combos = 1;
  for (const auto& p : pools) combos = std::min(combos * p.size(), prefix_cap);
  for (std::size_t r = 0; r < combos; ++r) {
    std::vector<Value> tup(types.size());
    std::size_t rest = r;
    for (std::size_t k = types.size(); k-- > 0;) {
      tup[k] = pools[k][rest % pools[k].size()];
      rest /= pools[k].size();
    }
    out.push_back(std::move(tup));
  }
  for (std::uint64_t pos = 0; out.size() < trials; ++pos) {
    out.push_back(inputgen::generate_args(types, gen, pos));
  }
  return out;
}

namespace {

bool same_args(const std::vector<Value>& a, const std::vector<Value>& b) {
  return a == b;
}

// 0 = value, 1 = timeout, 2 + kind for runtime errors.
int failure_class(const Outcome& o) {
  if (o.is_value()) return 0;
  if (o.is_exhausted()) return 1;
  return 2 + static_cast<int>(o.error().kind);
}

}  // namespace

StreamOutcomes evaluate_stream(const SuggestionSpace& space,
                               const std::vector<std::vector<Value>>& stream,
                               const EngineConfig& cfg) {
  const std::size_t n = space.candidates.size();
  std::vector<std::vector<Outcome>> rows(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    rows[i].reserve(stream.size());
    for (const auto& args : stream) {
      rows[i].push_back(space.evaluate(space.candidates[i], args, cfg.fuel));
    }
  });
  StreamOutcomes out;
  for (std::size_t i = 0; i < n; ++i) out.emplace(space.candidates[i].id, std::move(rows[i]));
  return out;
}

std::vector<Witness> fuzz_crashes(const SuggestionSpace& space, const EngineConfig& cfg,
                                  const StreamOutcomes* table) {
  if (space.spec.params.empty() || space.candidates.empty()) return {};
  const auto types = space.spec.param_types();
  const auto stream = input_stream(types, cfg.gen);
  const std::size_t n = space.candidates.size();

  // First failing stream position per failure class, per candidate.
  std::vector<std::vector<std::pair<int, std::size_t>>> firsts(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const Candidate& c = space.candidates[i];
    const std::vector<Outcome>* row = table ? &table->at(c.id) : nullptr;
    for (std::size_t t = 0; t < stream.size(); ++t) {
      Outcome o = row ? (*row)[t] : space.evaluate(c, stream[t], cfg.fuel);
      if (!o.is_failure()) continue;
      int cls = failure_class(o);
      bool seen = std::any_of(firsts[i].begin(), firsts[i].end(),
                              [&](const auto& f) { return f.first == cls; });
      if (!seen) firsts[i].emplace_back(cls, t);
    }
  });

  // Later inputs failing the same way almost always shrink to the same place,
  // so each candidate shrinks once per failure kind, and not at all when an
  // input found for an earlier candidate already fails it that way. Mutants
  // of one parent tend to share their crashes, and shrinking towards a
  // timeout or overflow costs a full fuel budget per step.
  std::vector<std::vector<Value>> unique;
  for (std::size_t i = 0; i < n; ++i) {
    const Candidate& c = space.candidates[i];
    for (const auto& [cls, t] : firsts[i]) {
      auto keep = [&, cls = cls](const std::vector<Value>& a) {
        return failure_class(space.evaluate(c, a, cfg.fuel)) == cls;
      };
      if (std::any_of(unique.begin(), unique.end(), keep)) continue;
      auto args = inputgen::shrink(stream[t], keep, cfg.shrink_budget);
      bool dup = std::any_of(unique.begin(), unique.end(),
                             [&](const auto& u) { return same_args(u, args); });
      if (!dup) unique.push_back(std::move(args));
    }
  }
  std::vector<Witness> out(unique.size());
  parallel_for(unique.size(), cfg.workers, [&](std::size_t k) {
    out[k] = make_witness(space, unique[k], Provenance::FuzzCrash, cfg.fuel);
  });
  return out;
}

bool satisfies(const SuggestionSpace& space, const Candidate& c,
               const acquisition::FunctionalExample& ex, std::uint64_t fuel) {
  Outcome o = space.evaluate(c, ex.args, fuel);
  if (!ex.expected) return o.is_error();
  return o.is_value() && minifn::canonical_equal(o.value(), *ex.expected);
}

SuggestionSpace filter_by_examples(const SuggestionSpace& space, const EngineConfig& cfg) {
  if (space.spec.examples.empty()) return space;
  std::vector<char> pass(space.candidates.size(), 0);
  parallel_for(space.candidates.size(), cfg.workers, [&](std::size_t i) {
    bool ok = true;
    for (const auto& ex : space.spec.examples) {
      if (!satisfies(space, space.candidates[i], ex, cfg.fuel)) {
        ok = false;
        break;
      }
    }
    pass[i] = ok;
  });
  SuggestionSpace out;
  out.spec = space.spec;
  for (std::size_t i = 0; i < space.candidates.size(); ++i) {
    if (!pass[i]) continue;
    const auto& c = space.candidates[i];
    out.candidates.push_back(c);
    if (auto it = space.runners.find(c.id); it != space.runners.end()) {
      out.runners.insert(*it);
    }
  }
  if (out.candidates.empty()) throw EmptySpaceError();
  return out;
}

std::vector<Witness> revalidate(const SuggestionSpace& space, const std::vector<Witness>& ws,
                                const EngineConfig& cfg) {
  std::vector<Witness> fresh(ws.size());
  parallel_for(ws.size(), cfg.workers, [&](std::size_t k) {
    // Outcomes are deterministic, so entries already in the partition are reused.
    Witness& w = fresh[k];
    w.args = ws[k].args;
    w.score = ws[k].score;
    w.provenance = ws[k].provenance;
    for (const auto& c : space.candidates) {
      auto it = ws[k].partition.find(c.id);
      w.partition.emplace(c.id, it != ws[k].partition.end()
                                    ? it->second
                                    : space.evaluate(c, w.args, cfg.fuel));
    }
  });
  std::vector<Witness> out;
  for (auto& w : fresh) {
    if (!w.nontrivial()) continue;
    bool dup = std::any_of(out.begin(), out.end(),
                           [&](const Witness& o) { return same_args(o.args, w.args); });
    if (!dup) out.push_back(std::move(w));
  }
  return out;
}

std::vector<Witness> pairwise_search(const SuggestionSpace& space, const EngineConfig& cfg,
                                     const std::vector<Witness>& known,
                                     const StreamOutcomes* table) {
  const std::size_t n = space.candidates.size();
  if (n < 2) return {};
  const auto types = space.spec.param_types();
  const auto stream = input_stream(types, cfg.gen);

  // Outcomes of every candidate on every stream input and known witness.
  std::vector<std::vector<Outcome>> on_stream(n), on_known(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const Candidate& c = space.candidates[i];
    on_known[i].reserve(known.size());
    for (const auto& w : known) {
      auto it = w.partition.find(c.id);
      on_known[i].push_back(it != w.partition.end() ? it->second
                                                    : space.evaluate(c, w.args, cfg.fuel));
    }
    if (table) {
      on_stream[i] = table->at(c.id);
      return;
    }
    on_stream[i].reserve(stream.size());
    for (const auto& args : stream) on_stream[i].push_back(space.evaluate(c, args, cfg.fuel));
  });

  std::vector<Witness> found;
  auto separated = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < known.size(); ++k) {
      if (!minifn::outcome_eq(on_known[i][k], on_known[j][k])) return true;
    }
    const auto& a = space.candidates[i].id;
    const auto& b = space.candidates[j].id;
    for (const auto& w : found) {
      if (!minifn::outcome_eq(w.partition.at(a), w.partition.at(b))) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (separated(i, j)) continue;
      std::size_t t = 0;
      while (t < stream.size() && minifn::outcome_eq(on_stream[i][t], on_stream[j][t])) ++t;
      if (t == stream.size()) continue;
      const Candidate& a = space.candidates[i];
      const Candidate& b = space.candidates[j];
      auto keep = [&](const std::vector<Value>& args) {
        return !minifn::outcome_eq(space.evaluate(a, args, cfg.fuel),
                                   space.evaluate(b, args, cfg.fuel));
      };
      auto args = inputgen::shrink(stream[t], keep, cfg.shrink_budget);
      bool dup = std::any_of(found.begin(), found.end(),
                             [&](const Witness& w) { return same_args(w.args, args); });
      if (dup) continue;  // cannot happen: that witness separates the pair
      found.push_back(
          make_witness(space, std::move(args), Provenance::Pairwise, cfg.fuel, cfg.workers));
    }
  }
  return found;
}

// ---- pipeline ------------------------------------------------------------

namespace {

std::size_t count_originals(const std::vector<Candidate>& cs) {
  return static_cast<std::size_t>(std::count_if(cs.begin(), cs.end(), [](const Candidate& c) {
    return c.origin != acquisition::Origin::Mutant;
  }));
}

PipelineResult finish(SuggestionSpace survivors, std::vector<Witness> kept,
                      std::vector<Witness> pairwise, const EngineConfig& cfg,
                      StageCounts counts, std::vector<std::string> diagnostics) {
  counts.survivors = survivors.candidates.size();
  counts.survivors_original = count_originals(survivors.candidates);
  counts.kept_after_trim = kept.size();
  counts.pairwise_witnesses = pairwise.size();
  std::vector<Witness> all = std::move(kept);
  all.insert(all.end(), std::make_move_iterator(pairwise.begin()),
             std::make_move_iterator(pairwise.end()));
  PipelineResult r;
  r.report.witnesses = report::dedupe_witnesses(std::move(all));
  counts.reported = r.report.witnesses.size();
  r.report.spec = survivors.spec;
  r.report.survivors = survivors.candidates;
  r.report.diagnostics = std::move(diagnostics);
  r.report.config = cfg;
  r.report.counts = counts;
  r.space = std::move(survivors);
  return r;
}

}  // namespace

PipelineResult run_on_space(const SuggestionSpace& space, const EngineConfig& cfg,
                            StageCounts counts, std::vector<std::string> diagnostics) {
  const auto stream = input_stream(space.spec.param_types(), cfg.gen);
  const auto table = evaluate_stream(space, stream, cfg);
  auto crashes = fuzz_crashes(space, cfg, &table);
  counts.crash_witnesses = crashes.size();
  SuggestionSpace survivors = filter_by_examples(space, cfg);
  auto kept = revalidate(survivors, crashes, cfg);
  auto pairwise = pairwise_search(survivors, cfg, kept, &table);
  return finish(std::move(survivors), std::move(kept), std::move(pairwise), cfg, counts,
                std::move(diagnostics));
}

PipelineResult refine(const SuggestionSpace& space, const FunctionSpec& spec,
                      const std::vector<Witness>& previous, const EngineConfig& cfg) {
  SuggestionSpace updated = space;
  updated.spec = spec;
  SuggestionSpace survivors = filter_by_examples(updated, cfg);
  auto kept = revalidate(survivors, previous, cfg);
  auto pairwise = pairwise_search(survivors, cfg, kept);
  StageCounts counts;
  counts.valid = count_originals(space.candidates);
  counts.mutants = space.candidates.size() - counts.valid;
  return finish(std::move(survivors), std::move(kept), std::move(pairwise), cfg, counts, {});
}

PipelineResult run_pipeline(const FunctionSpec& spec,
                            const acquisition::ProviderConfig& provider,
                            const EngineConfig& cfg) {
  spec.validate();
  cfg.gen.validate();
  auto sources = acquisition::fetch_candidates(acquisition::build_prompt(spec), provider.n,
                                               provider);
  auto origin = provider.kind == acquisition::ProviderConfig::Kind::Http
                    ? acquisition::Origin::Llm
                    : acquisition::Origin::Corpus;
  auto valid = acquisition::validate_and_dedupe(sources, spec, origin);

  StageCounts counts;
  counts.acquired = sources.size();
  counts.valid = valid.candidates.size();

  SuggestionSpace space;
  space.spec = spec;
  space.candidates = std::move(valid.candidates);
  if (cfg.mutants) {
    auto mutants =
        acquisition::make_mutants(space.candidates, cfg.mutant_cap_per_parent,
                                  cfg.mutant_global_cap);
    counts.mutants = mutants.size();
    space.candidates.insert(space.candidates.end(), std::make_move_iterator(mutants.begin()),
                            std::make_move_iterator(mutants.end()));
  }
  return run_on_space(space, cfg, counts, std::move(valid.diagnostics));
}

}  // namespace disambig::engine
