#include "disambig/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "disambig/benchmark.hpp"
#include "disambig/minifn/parser.hpp"
#include "disambig/minifn/printer.hpp"
#include "disambig/minifn/typecheck.hpp"
#include "disambig/report.hpp"
#include "disambig/service.hpp"

namespace disambig::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EngineFlags {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::uint64_t fuel = 0;
  int max_list_len = -1;
  std::size_t workers = 1;
  bool no_mutants = false;
  std::string config_file;

  void add_to(CLI::App& app) {
    app.add_option("--seed", seed, "Random seed (default 0)");
    app.add_option("--trials", trials, "Inputs tried per target (default 200)");
    app.add_option("--fuel", fuel, "Interpreter steps per call (default 100000)");
    app.add_option("--max-list-len", max_list_len, "Longest generated list (default 8)");
    app.add_option("--workers", workers, "Worker threads; never changes results");
    app.add_flag("--no-mutants", no_mutants, "Skip mutant generation");
    app.add_option("--config", config_file, "JSON file with engine settings");
  }

  engine::EngineConfig build() const {
    json j = json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw Usage("cannot read config " + config_file);
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw Usage(config_file + ": " + e.what());
      }
    }
    engine::EngineConfig cfg;
    try {
      cfg = engine::EngineConfig::from_json(j);
    } catch (const std::invalid_argument& e) {
      throw Usage(e.what());
    }
    if (seed != 0 || !j.contains("seed")) cfg.gen.seed = seed;
    if (trials != 0) cfg.gen.trials_per_target = trials;
    if (fuel != 0) cfg.fuel = fuel;
    if (max_list_len >= 0) cfg.gen.max_list_len = static_cast<std::size_t>(max_list_len);
    if (no_mutants) cfg.mutants = false;
    cfg.workers = std::max<std::size_t>(1, workers);
    try {
      cfg.gen.validate();
    } catch (const std::invalid_argument& e) {
      throw Usage(e.what());
    }
    return cfg;
  }
};

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Usage("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Find inputs on which plausible implementations of a function disagree."};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Analyse one function spec");
  std::string spec_path, corpus_dir, provider_path, format = "text", out_path;
  std::vector<std::string> runners;
  EngineFlags run_flags;
  run->add_option("spec", spec_path, ".fnspec file")->required();
  auto* corpus_opt = run->add_option("--corpus", corpus_dir, "Directory of .mfn candidates");
  auto* provider_opt = run->add_option("--provider", provider_path, "Provider config (JSON)");
  corpus_opt->excludes(provider_opt);
  run->add_option("--runner", runners,
                  "Extra candidate served by an external process (command line)");
  run->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  run->add_option("-o,--output", out_path, "Write the report here instead of stdout");
  run_flags.add_to(*run);

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark matrix over a dataset");
  std::string dataset_dir, bench_format = "csv", bench_out;
  std::size_t k = 5;
  EngineFlags bench_flags;
  bench->add_option("dataset", dataset_dir, "Dataset directory")->required();
  bench->add_option("--k", k, "Runs per cell (top@k)");
  bench->add_option("--format", bench_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("-o,--output", bench_out, "Write the table here instead of stdout");
  bench_flags.add_to(*bench);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve analysis sessions over HTTP");
  service::ServiceOptions svc;
  std::string state_dir, static_dir;
  serve->add_option("--host", svc.host, "Bind address");
  serve->add_option("--port", svc.port, "Port");
  serve->add_option("--state-dir", state_dir, "Persist sessions here");
  serve->add_option("--static", static_dir, "Serve a UI from this directory");
  serve->add_option("--workers", svc.workers, "Worker threads per pipeline run");

  // fmt
  auto* fmt = app.add_subcommand("fmt", "Pretty-print a .mfn file");
  std::string fmt_path;
  bool fmt_check = false;
  fmt->add_option("file", fmt_path, ".mfn file")->required();
  fmt->add_flag("--check", fmt_check, "Only report whether the file is canonical");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }

  try {
    if (run->parsed()) {
      if (corpus_dir.empty() && provider_path.empty() && runners.empty()) {
        throw Usage("run needs --corpus, --provider or --runner");
      }
      if (!fs::exists(spec_path)) throw Usage("spec file not found: " + spec_path);
      acquisition::FunctionSpec spec;
      try {
        spec = acquisition::load_fnspec(spec_path);
      } catch (const acquisition::SpecError& e) {
        throw Usage(e.what());
      }
      auto cfg = run_flags.build();
      acquisition::ProviderConfig provider;
      if (!provider_path.empty()) {
        try {
          provider = acquisition::load_provider_config(provider_path);
        } catch (const acquisition::ProviderError& e) {
          throw Usage(e.what());
        }
      } else if (!corpus_dir.empty()) {
        if (!fs::is_directory(corpus_dir)) throw Usage("corpus directory not found: " + corpus_dir);
        provider = acquisition::offline_provider(corpus_dir);
      }

      engine::PipelineResult result;
      if (runners.empty()) {
        result = engine::run_pipeline(spec, provider, cfg);
      } else {
        // Foreign candidates join the space directly; they are not mutated.
        engine::SuggestionSpace space;
        space.spec = spec;
        engine::StageCounts counts;
        std::vector<std::string> diagnostics;
        if (!corpus_dir.empty() || !provider_path.empty()) {
          auto sources =
              acquisition::fetch_candidates(acquisition::build_prompt(spec), provider.n, provider);
          auto valid = acquisition::validate_and_dedupe(sources, spec);
          counts.acquired = sources.size();
          counts.valid = valid.candidates.size();
          space.candidates = std::move(valid.candidates);
          diagnostics = std::move(valid.diagnostics);
          if (cfg.mutants) {
            auto mutants = acquisition::make_mutants(space.candidates, cfg.mutant_cap_per_parent,
                                                     cfg.mutant_global_cap);
            counts.mutants = mutants.size();
            space.candidates.insert(space.candidates.end(), mutants.begin(), mutants.end());
          }
        }
        for (std::size_t i = 0; i < runners.size(); ++i) {
          auto words = split_words(runners[i]);
          if (words.empty()) throw Usage("empty --runner command");
          space.add_foreign("runner-" + std::to_string(i), std::move(words));
          ++counts.acquired;
          ++counts.valid;
        }
        result = engine::run_on_space(space, cfg, counts, std::move(diagnostics));
      }
      if (format == "json") {
        emit(report::to_json_text(result.report), out_path, out);
      } else {
        for (const auto& d : result.report.diagnostics) err << "note: " << d << "\n";
        emit(report::render_partial_examples(result.report), out_path, out);
      }
      return 0;
    }

    if (bench->parsed()) {
      std::vector<benchmark::BenchmarkCase> dataset;
      try {
        dataset = benchmark::load_dataset(dataset_dir);
      } catch (const benchmark::ManifestError& e) {
        throw Usage(e.what());
      }
      if (k == 0) throw Usage("--k must be at least 1");
      auto cfg = bench_flags.build();
      auto m = benchmark::run_matrix(dataset, k, cfg);
      for (std::size_t i = 0; i < m.cases.size(); ++i) {
        for (const auto& [v, cell] : m.cells[i]) {
          for (const auto& e : cell.errors) {
            err << "note: " << m.cases[i] << " " << acquisition::to_string(v) << ": " << e
                << "\n";
          }
        }
      }
      emit(bench_format == "json" ? benchmark::matrix_json(m).dump(2) + "\n"
                                  : benchmark::matrix_csv(m),
           bench_out, out);
      return 0;
    }

    if (serve->parsed()) {
      svc.state_dir = state_dir;
      svc.static_dir = static_dir;
      err << "listening on http://" << svc.host << ":" << svc.port << "\n";
      if (service::serve(svc) != 0) {
        err << "error: cannot listen on " << svc.host << ":" << svc.port << "\n";
        return 1;
      }
      return 0;
    }

    if (fmt->parsed()) {
      std::ifstream in(fmt_path, std::ios::binary);
      if (!in) throw Usage("cannot read " + fmt_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      minifn::FunctionDef def;
      try {
        def = minifn::parse(ss.str());
        minifn::typecheck(def);
      } catch (const minifn::ParseError& e) {
        err << fmt_path << ":" << e.what() << "\n";
        return 1;
      } catch (const minifn::TypeError& e) {
        err << fmt_path << ":" << e.what() << "\n";
        return 1;
      }
      auto pretty = minifn::print(def);
      if (fmt_check) {
        if (pretty == ss.str()) return 0;
        err << fmt_path << ": not in canonical form\n";
        return 1;
      }
      out << pretty;
      return 0;
    }
  } catch (const Usage& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const engine::EmptySpaceError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const acquisition::ProviderError& e) {
    err << "error: provider: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace disambig::cli
