#include "disambig/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "disambig/minifn/parser.hpp"
#include "disambig/minifn/typecheck.hpp"

namespace disambig::benchmark {

namespace fs = std::filesystem;
using nlohmann::json;

bool aic_matches(const AicSpec& aic, const std::vector<Value>& args, std::uint64_t fuel) {
  auto o = minifn::eval_call(aic.matcher, args, fuel);
  if (!o.is_value()) {
    throw MatcherFailure("matcher " + aic.id + " gave " + o.describe() + " on (" +
                         minifn::args_literal(args) + ")");
  }
  return o.value().as_bool();
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ManifestError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw ManifestError(where + ": missing string '" + key + "'");
  }
  return obj[key].get<std::string>();
}

AicSpec load_aic(const json& entry, const fs::path& dir, const FunctionSpec& target) {
  AicSpec aic;
  aic.id = get_string(entry, "id", "aic");
  const std::string where = "aic " + aic.id;
  aic.description = entry.value("description", "");
  auto path = dir / get_string(entry, "matcher", where);
  try {
    aic.matcher = minifn::parse(read_file(path));
    minifn::typecheck(aic.matcher);
  } catch (const minifn::ParseError& e) {
    throw ManifestError(path.string() + ": " + e.what());
  } catch (const minifn::TypeError& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
  const auto& m = aic.matcher;
  bool same = m.params.size() == target.params.size() && m.return_type == minifn::Type::Bool();
  for (std::size_t i = 0; same && i < m.params.size(); ++i) {
    same = m.params[i].type == target.params[i].type;
  }
  if (!same) {
    throw ManifestError(where + ": matcher must take the target's parameters and return Bool");
  }

  std::vector<std::string> literals;
  if (entry.contains("witness")) literals.push_back(get_string(entry, "witness", where));
  if (entry.contains("witnesses")) {
    for (const auto& w : entry["witnesses"]) literals.push_back(w.get<std::string>());
  }
  if (literals.empty()) throw ManifestError(where + ": no bundled witness");
  for (const auto& lit : literals) {
    try {
      aic.witnesses.push_back(minifn::parse_values(lit, target.param_types()));
    } catch (const minifn::ParseError& e) {
      throw ManifestError(where + ": bad witness '" + lit + "': " + e.what());
    }
    bool ok = false;
    try {
      ok = aic_matches(aic, aic.witnesses.back());
    } catch (const MatcherFailure& e) {
      throw ManifestError(where + ": " + e.what());
    }
    if (!ok) throw ManifestError(where + ": matcher rejects its witness " + lit);
  }
  return aic;
}

}  // namespace

BenchmarkCase load_case(const fs::path& dir) {
  auto manifest_path = dir / "case.toml";
  json m;
  try {
    m = parse_toml(read_file(manifest_path));
  } catch (const ManifestError& e) {
    throw ManifestError(manifest_path.string() + ": " + e.what());
  }
  BenchmarkCase c;
  c.dir = dir;
  c.name = get_string(m, "name", manifest_path.string());
  if (!m.contains("variants") || !m.contains("corpus")) {
    throw ManifestError(c.name + ": needs [variants] and [corpus] tables");
  }
  for (auto v : kVariants) {
    std::string tag(acquisition::to_string(v));
    auto spec_path = dir / get_string(m["variants"], tag, c.name + " [variants]");
    FunctionSpec spec;
    try {
      spec = acquisition::load_fnspec(spec_path);
      spec.variant = v;
      spec.validate();
    } catch (const acquisition::SpecError& e) {
      throw ManifestError(c.name + " " + tag + ": " + e.what());
    }
    if (!c.variants.empty()) {
      const auto& first = c.variants.begin()->second;
      if (spec.signature() != first.signature()) {
        throw ManifestError(c.name + " " + tag + ": signature differs from the other variants");
      }
    }
    c.variants.emplace(v, std::move(spec));
    auto corpus = dir / get_string(m["corpus"], tag, c.name + " [corpus]");
    if (!fs::is_directory(corpus)) {
      throw ManifestError(c.name + " " + tag + ": corpus directory " + corpus.string() +
                          " not found");
    }
    c.corpus.emplace(v, corpus);
  }
  if (!m.contains("aic") || !m["aic"].is_array() || m["aic"].empty()) {
    throw ManifestError(c.name + ": needs at least one [[aic]]");
  }
  if (m["aic"].size() > 3) throw ManifestError(c.name + ": at most three AICs per case");
  for (const auto& entry : m["aic"]) {
    c.aics.push_back(load_aic(entry, dir, c.variants.at(Variant::S)));
  }
  return c;
}

std::vector<BenchmarkCase> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ManifestError("dataset directory not found: " + dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "case.toml")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<BenchmarkCase> out;
  for (const auto& d : dirs) out.push_back(load_case(d));
  if (out.empty()) throw ManifestError("no case.toml under " + dir.string());
  return out;
}

Coverage aic_coverage(const std::vector<std::vector<Value>>& inputs,
                      const std::vector<AicSpec>& aics) {
  Coverage cov;
  if (aics.empty()) return cov;
  for (const auto& aic : aics) {
    bool caught = false;
    for (const auto& args : inputs) {
      try {
        if (aic_matches(aic, args)) {
          caught = true;
          break;
        }
      } catch (const MatcherFailure& e) {
        cov.diagnostics.push_back(e.what());
      }
    }
    if (caught) cov.caught.push_back(aic.id);
  }
  cov.fraction = static_cast<double>(cov.caught.size()) / static_cast<double>(aics.size());
  return cov;
}

Coverage aic_coverage(const engine::Report& report, const std::vector<AicSpec>& aics) {
  std::vector<std::vector<Value>> inputs;
  for (const auto& w : report.witnesses) inputs.push_back(w.args);
  return aic_coverage(inputs, aics);
}

double topk(const std::vector<double>& coverages) {
  if (coverages.empty()) throw std::invalid_argument("topk needs at least one run");
  return *std::max_element(coverages.begin(), coverages.end());
}

double topk(const std::vector<engine::Report>& runs, const std::vector<AicSpec>& aics) {
  std::vector<double> cs;
  for (const auto& r : runs) cs.push_back(aic_coverage(r, aics).fraction);
  return topk(cs);
}

double Matrix::mean(Variant v) const {
  if (cells.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& row : cells) sum += row.at(v).top;
  return sum / static_cast<double>(cells.size());
}

Matrix run_matrix(const std::vector<BenchmarkCase>& dataset, std::size_t k,
                  const engine::EngineConfig& cfg) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  Matrix m;
  m.k = k;
  m.seed = cfg.gen.seed;
  const std::size_t nv = kVariants.size();
  std::vector<Cell> flat(dataset.size() * nv);
  engine::parallel_for(flat.size(), cfg.workers, [&](std::size_t idx) {
    const auto& bc = dataset[idx / nv];
    Variant v = kVariants[idx % nv];
    Cell& cell = flat[idx];
    auto provider = acquisition::offline_provider(bc.corpus.at(v));
    for (std::size_t r = 1; r <= k; ++r) {
      engine::EngineConfig run_cfg = cfg;
      run_cfg.workers = 1;
      run_cfg.gen.seed = cfg.gen.seed + r;
      double cov = 0.0;
      try {
        auto res = engine::run_pipeline(bc.variants.at(v), provider, run_cfg);
        auto c = aic_coverage(res.report, bc.aics);
        cov = c.fraction;
        for (auto& d : c.diagnostics) cell.errors.push_back(std::move(d));
      } catch (const std::exception& e) {
        cell.errors.push_back("seed " + std::to_string(run_cfg.gen.seed) + ": " + e.what());
      }
      cell.runs.push_back(cov);
    }
    cell.top = topk(cell.runs);
  });
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    m.cases.push_back(dataset[i].name);
    std::map<Variant, Cell> row;
    for (std::size_t j = 0; j < nv; ++j) row.emplace(kVariants[j], std::move(flat[i * nv + j]));
    m.cells.push_back(std::move(row));
  }
  return m;
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string matrix_csv(const Matrix& m) {
  std::string out = "case";
  for (auto v : kVariants) out += "," + std::string(acquisition::to_string(v));
  out += "\n";
  for (std::size_t i = 0; i < m.cases.size(); ++i) {
    out += m.cases[i];
    for (auto v : kVariants) out += "," + fixed(m.cells[i].at(v).top);
    out += "\n";
  }
  out += "mean";
  for (auto v : kVariants) out += "," + fixed(m.mean(v));
  return out + "\n";
}

json matrix_json(const Matrix& m) {
  json cases = json::array();
  for (std::size_t i = 0; i < m.cases.size(); ++i) {
    json row = {{"case", m.cases[i]}, {"variants", json::object()}};
    for (auto v : kVariants) {
      const auto& cell = m.cells[i].at(v);
      row["variants"][std::string(acquisition::to_string(v))] = {
          {"top", cell.top}, {"runs", cell.runs}, {"errors", cell.errors}};
    }
    cases.push_back(std::move(row));
  }
  json means = json::object();
  for (auto v : kVariants) means[std::string(acquisition::to_string(v))] = m.mean(v);
  return {{"k", m.k}, {"seed", m.seed}, {"cases", std::move(cases)}, {"mean", std::move(means)}};
}

}  // namespace disambig::benchmark
