#include <sstream>

#include <gtest/gtest.h>

#include "disambig/cli.hpp"
#include "support.hpp"

namespace disambig::cli {
namespace {

namespace fs = std::filesystem;
using testing::bench_dir;
using testing::fixtures;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "disambig");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string spec(const char* variant) {
  return (bench_dir() / "first_nonzero" / (std::string(variant) + ".fnspec")).string();
}
std::string corpus(const char* variant) {
  return (bench_dir() / "first_nonzero" / "corpus" / variant).string();
}

TEST(Cli, RunPrintsPartialExamples) {
  auto r = run({"run", spec("SP1"), "--corpus", corpus("SP1"), "--no-mutants"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(">>> first_nonzero([])\n???"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(">>> first_nonzero([nan])\n???"), std::string::npos) << r.out;
}

TEST(Cli, JsonIsReproducible) {
  auto a = run({"run", spec("SP1"), "--corpus", corpus("SP1"), "--format", "json", "--seed",
                "4"});
  auto b = run({"run", spec("SP1"), "--corpus", corpus("SP1"), "--format", "json", "--seed",
                "4", "--workers", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["meta"]["seed"], 4);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"run", spec("SP1")}).code, 2);
  EXPECT_EQ(run({"run", "/no/such.fnspec", "--corpus", corpus("SP1")}).code, 2);
  EXPECT_EQ(run({"run", spec("SP1"), "--corpus", "/no/such/dir"}).code, 2);
  EXPECT_EQ(run({"run", spec("SP1"), "--corpus", corpus("SP1"), "--format", "xml"}).code, 2);
  auto cfg = fs::temp_directory_path() / "disambig_cli_bad_config.json";
  std::ofstream(cfg) << R"({"special_value_bias": 2.0})";
  EXPECT_EQ(run({"run", spec("SP1"), "--corpus", corpus("SP1"), "--config", cfg.string()}).code,
            2);
  fs::remove(cfg);
  EXPECT_EQ(run({"bench", "/no/such/dataset"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, InconsistentExamplesExitOne) {
  auto dir = fs::temp_directory_path() / "disambig_cli_spec";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.fnspec") << "fn first_nonzero(nums: List[Float]) -> Float\n"
                                       ">>> first_nonzero([])\n123.0\n";
  auto r = run({"run", (dir / "bad.fnspec").string(), "--corpus", corpus("SP1")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no candidate survives"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ProviderFailureExitsOne) {
  auto dir = fs::temp_directory_path() / "disambig_cli_provider";
  fs::create_directories(dir);
  std::ofstream(dir / "p.json")
      << R"({"endpoint": "http://127.0.0.1:1/v1/completions", "timeout": 1, "n": 2})";
  auto r = run({"run", spec("SP1"), "--provider", (dir / "p.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("provider"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, FmtPrintsAndChecks) {
  auto dir = fs::temp_directory_path() / "disambig_cli_fmt";
  fs::create_directories(dir);
  auto messy = dir / "messy.mfn";
  std::ofstream(messy) << "fn f(x:Int)->Int{return x+1;}";
  auto r = run({"fmt", messy.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "fn f(x: Int) -> Int {\n    return x + 1;\n}\n");
  EXPECT_EQ(run({"fmt", "--check", messy.string()}).code, 1);
  auto clean = dir / "clean.mfn";
  std::ofstream(clean) << r.out;
  EXPECT_EQ(run({"fmt", "--check", clean.string()}).code, 0);
  auto broken = dir / "broken.mfn";
  std::ofstream(broken) << "fn f( {";
  auto b = run({"fmt", broken.string()});
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.err.find("broken.mfn:"), std::string::npos);
  fs::remove_all(dir);
}

#ifdef DISAMBIG_PYTHON
TEST(Cli, RunnerJoinsTheCorpus) {
  std::string cmd = std::string(DISAMBIG_PYTHON) + " " +
                    (fixtures() / "runner/first_nonzero.py").string();
  auto r = run({"run", spec("SP1"), "--corpus", corpus("SP1"), "--no-mutants", "--runner", cmd,
                "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  bool has_runner = false;
  for (const auto& c : j["candidates"]) has_runner |= c["label"] == "runner-0";
  EXPECT_TRUE(has_runner);
}
#endif

// The installed binary behaves like the in-process entry point.
TEST(Binary, ExitCodes) {
  std::string bin = DISAMBIG_CLI_PATH;
  EXPECT_EQ(std::system((bin + " fmt " + spec("SP1") + " > /dev/null 2>&1").c_str()) >> 8, 1);
  EXPECT_EQ(std::system((bin + " bogus > /dev/null 2>&1").c_str()) >> 8, 2);
  auto src = bench_dir() / "first_nonzero/corpus/SP1/a_raise.mfn";
  EXPECT_EQ(std::system((bin + " fmt --check " + src.string() + " > /dev/null 2>&1").c_str()) >> 8,
            0);
}

}  // namespace
}  // namespace disambig::cli
