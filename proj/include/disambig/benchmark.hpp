#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disambig/acquisition.hpp"
#include "disambig/engine.hpp"

namespace disambig::benchmark {

using acquisition::FunctionSpec;
using acquisition::Variant;
using minifn::Value;

inline constexpr std::array<Variant, 4> kVariants{Variant::S, Variant::SP, Variant::SP1,
                                                  Variant::SPx};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The part of TOML the manifests use: comments, `key = value` with strings
// (basic and literal), integers, floats, booleans and one-line arrays,
// `[table]` and `[[array-of-tables]]` headers. Throws ManifestError.
nlohmann::json parse_toml(std::string_view text);

class MatcherFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AicSpec {
  std::string id;
  std::string description;
  minifn::FunctionDef matcher;                   // target params -> Bool
  std::vector<std::vector<Value>> witnesses;     // bundled members
};

// True iff the matcher returns true on args; MatcherFailure if it errors or
// runs out of fuel.
bool aic_matches(const AicSpec& aic, const std::vector<Value>& args,
                 std::uint64_t fuel = minifn::kDefaultFuel);

struct BenchmarkCase {
  std::string name;
  std::filesystem::path dir;
  std::map<Variant, FunctionSpec> variants;
  std::map<Variant, std::filesystem::path> corpus;
  std::vector<AicSpec> aics;
};

// Reads <dir>/case.toml. Checks that all four variants exist and obey the
// ladder, matchers typecheck against the signature, and every AIC accepts its
// bundled witnesses.
BenchmarkCase load_case(const std::filesystem::path& dir);

// Every subdirectory holding a case.toml, by name.
std::vector<BenchmarkCase> load_dataset(const std::filesystem::path& dir);

struct Coverage {
  double fraction = 0.0;
  std::vector<std::string> caught;       // AIC ids
  std::vector<std::string> diagnostics;  // matcher failures
};

Coverage aic_coverage(const engine::Report& report, const std::vector<AicSpec>& aics);
Coverage aic_coverage(const std::vector<std::vector<Value>>& inputs,
                      const std::vector<AicSpec>& aics);

// Best of the runs. Precondition: non-empty.
double topk(const std::vector<double>& coverages);
double topk(const std::vector<engine::Report>& runs, const std::vector<AicSpec>& aics);

struct Cell {
  std::vector<double> runs;  // coverage per seed
  double top = 0.0;
  std::vector<std::string> errors;
};

struct Matrix {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> cases;
  std::vector<std::map<Variant, Cell>> cells;  // parallel to cases

  double mean(Variant v) const;
};

// Runs each (case, variant) k times with seeds seed+1 .. seed+k over that
// variant's corpus. Cells run on cfg.workers threads; results match a serial
// run.
Matrix run_matrix(const std::vector<BenchmarkCase>& dataset, std::size_t k,
                  const engine::EngineConfig& cfg);

std::string matrix_csv(const Matrix& m);
nlohmann::json matrix_json(const Matrix& m);

}  // namespace disambig::benchmark
