#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "disambig/minifn/printer.hpp"
#include "disambig/minifn/value_json.hpp"
#include "support.hpp"

namespace disambig::acquisition {
namespace {

using testing::bench_dir;
using testing::fixtures;
using testing::slurp;

FunctionSpec sp1() { return load_fnspec(bench_dir() / "first_nonzero" / "SP1.fnspec"); }

TEST(Fnspec, ParsesTheLadder) {
  auto s = load_fnspec(bench_dir() / "first_nonzero" / "S.fnspec");
  EXPECT_EQ(s.signature(), "fn first_nonzero(nums: List[Float]) -> Float");
  EXPECT_FALSE(s.purpose.has_value());
  auto x = load_fnspec(bench_dir() / "first_nonzero" / "SPx.fnspec");
  EXPECT_EQ(x.purpose.value_or(""), "Return the first non-zero value in nums.");
  ASSERT_EQ(x.examples.size(), 2u);
  EXPECT_EQ(x.call(x.examples[1].args), "first_nonzero([-3.14])");
  EXPECT_EQ(minifn::to_literal(*x.examples[1].expected), "-3.14");
}

TEST(Fnspec, ErrorExamplesAndComments) {
  auto spec = parse_fnspec(R"(# integer quotient
fn divide(a: Int, b: Int) -> Int
"""
Divide a by b.
Truncates.
"""

>>> divide(6, 3)
2
>>> divide(1, 0)
!error
)");
  EXPECT_EQ(spec.purpose.value_or(""), "Divide a by b.\nTruncates.");
  ASSERT_EQ(spec.examples.size(), 2u);
  EXPECT_FALSE(spec.examples[1].expected.has_value());
  auto again = parse_fnspec(format_fnspec(spec));
  EXPECT_EQ(format_fnspec(again), format_fnspec(spec));
}

TEST(Fnspec, RejectsBadExamples) {
  EXPECT_THROW(parse_fnspec("fn f(x: Int) -> Int\n>>> g(1)\n1\n"), SpecError);
  EXPECT_THROW(parse_fnspec("fn f(x: Int) -> Int\n>>> f(1, 2)\n1\n"), SpecError);
  EXPECT_THROW(parse_fnspec("fn f(x: Int) -> Int\n>>> f(1)\n"), SpecError);
  EXPECT_THROW(parse_fnspec("fn f(x: Int) -> Int\n>>> f(1)\n\"one\"\n"), SpecError);
  EXPECT_THROW(parse_fnspec("not a signature\n"), SpecError);
}

TEST(Fnspec, VariantRules) {
  auto spec = sp1();
  spec.variant = Variant::SP1;
  EXPECT_NO_THROW(spec.validate());
  spec.variant = Variant::SPx;
  EXPECT_THROW(spec.validate(), SpecError);
  spec.variant = Variant::S;
  EXPECT_THROW(spec.validate(), SpecError);
  EXPECT_EQ(parse_variant("SPx"), Variant::SPx);
  EXPECT_FALSE(parse_variant("SP2").has_value());
}

TEST(Prompt, DocBlockCarriesPurposeAndExamples) {
  EXPECT_EQ(build_prompt(sp1()),
            "fn first_nonzero(nums: List[Float]) -> Float {\n"
            "    \"\"\"Return the first non-zero value in nums.\n"
            "\n"
            "    >>> first_nonzero([0.0, 3.7, 0.0])\n"
            "    3.7\n"
            "    \"\"\"\n");
  auto s = load_fnspec(bench_dir() / "first_nonzero" / "S.fnspec");
  EXPECT_EQ(build_prompt(s), "fn first_nonzero(nums: List[Float]) -> Float {\n");
}

TEST(SpecJson, RoundTrip) {
  auto spec = load_fnspec(bench_dir() / "first_nonzero" / "SPx.fnspec");
  auto back = spec_from_json(spec_to_json(spec));
  EXPECT_EQ(format_fnspec(back), format_fnspec(spec));
  auto from_text = spec_from_json(nlohmann::json(format_fnspec(spec)));
  EXPECT_EQ(format_fnspec(from_text), format_fnspec(spec));

  auto ex = example_from_json(
      nlohmann::json::parse(R"({"args": [["NaN"]], "expected": {"kind": "value", "value": 0.0}})"),
      spec);
  EXPECT_EQ(spec.call(ex.args), "first_nonzero([nan])");
  EXPECT_EQ(example_to_json(ex)["expected"]["kind"], "value");
  auto err = example_from_json(
      nlohmann::json::parse(R"({"args": [[]], "expected": {"kind": "error"}})"), spec);
  EXPECT_FALSE(err.expected.has_value());
  EXPECT_THROW(example_from_json(nlohmann::json::parse(R"({"args": [1]})"), spec),
               minifn::ValueDecodeError);
}

TEST(Validate, RenamesChecksAndDeduplicates) {
  std::vector<RawSource> sources{
      {"ok", slurp(bench_dir() / "first_nonzero/corpus/SP1/a_raise.mfn")},
      {"renamed", "fn fnz(nums: List[Float]) -> Float { return 0.0; }"},
      {"reformatted", "fn first_nonzero(nums: List[Float]) -> Float {\n"
                      "  for num in nums { if num != 0.0 { return num; } }\n"
                      "  raise(\"No non-zero numbers in the list\");\n}\n"},
      {"arity", "fn first_nonzero(a: List[Float], b: Int) -> Float { return 0.0; }"},
      {"returns", "fn first_nonzero(nums: List[Float]) -> Int { return 0; }"},
      {"syntax", "fn first_nonzero(nums: List[Float]) -> Float { return }"},
      {"types", "fn first_nonzero(nums: List[Float]) -> Float { return len(nums); }"},
  };
  auto v = validate_and_dedupe(sources, sp1());
  ASSERT_EQ(v.candidates.size(), 2u);
  EXPECT_EQ(v.candidates[0].label, "ok");
  EXPECT_EQ(v.candidates[1].label, "renamed");
  EXPECT_EQ(v.candidates[1].def.name, "first_nonzero");
  EXPECT_EQ(v.candidates[0].id, candidate_id(v.candidates[0].def));
  EXPECT_EQ(v.candidates[0].id.size(), 16u);
  EXPECT_EQ(v.diagnostics.size(), 6u);
  auto has = [&](const std::string& needle) {
    return std::any_of(v.diagnostics.begin(), v.diagnostics.end(),
                       [&](const std::string& d) { return d.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("renamed: renamed fnz"));
  EXPECT_TRUE(has("reformatted: duplicate"));
  EXPECT_TRUE(has("arity: signature mismatch"));
  EXPECT_TRUE(has("returns: signature mismatch"));
  EXPECT_TRUE(has("syntax: parse error"));
  EXPECT_TRUE(has("types: type error"));
}

TEST(Validate, UnparsableFixtureIsReported) {
  auto dir = fixtures() / "unparsable";
  auto sources = fetch_candidates("", 10, offline_provider(dir));
  ASSERT_EQ(sources.size(), 3u);
  auto v = validate_and_dedupe(sources, sp1());
  EXPECT_EQ(v.candidates.size(), 1u);
  EXPECT_EQ(v.diagnostics.size(), 2u);
}

TEST(Mutants, LabelsAndCaps) {
  auto v = validate_and_dedupe(fetch_candidates("", 10, offline_provider(bench_dir() /
                                                                         "first_nonzero/corpus/SP1")),
                               sp1());
  ASSERT_EQ(v.candidates.size(), 5u);
  auto ms = make_mutants(v.candidates, 40, 200);
  EXPECT_GT(ms.size(), 10u);
  std::set<std::string> ids;
  for (const auto& c : v.candidates) ids.insert(c.id);
  for (const auto& m : ms) {
    EXPECT_EQ(m.origin, Origin::Mutant);
    EXPECT_TRUE(ids.count(m.parent));
    EXPECT_TRUE(m.op.has_value());
    EXPECT_NE(m.label.find('~'), std::string::npos) << m.label;
    EXPECT_TRUE(ids.insert(m.id).second) << "duplicate mutant " << m.label;
    EXPECT_EQ(minifn::print(m.def), m.source);
  }
  EXPECT_EQ(make_mutants(v.candidates, 2, 7).size(), 7u);
  EXPECT_LE(make_mutants(v.candidates, 1, 200).size(), 5u);
}

TEST(Offline, SortedAndTruncated) {
  auto p = offline_provider(bench_dir() / "first_nonzero/corpus/SPx");
  auto all = fetch_candidates("", 100, p);
  ASSERT_EQ(all.size(), 7u);
  EXPECT_EQ(all.front().label, "a_raise");
  EXPECT_EQ(fetch_candidates("", 3, p).size(), 3u);
  EXPECT_THROW(fetch_candidates("", 3, offline_provider(fixtures() / "missing")), ProviderError);
}

TEST(ProviderConfig, JsonAndRelativeDirectories) {
  auto p = load_provider_config(fixtures() / "provider_offline.json");
  EXPECT_EQ(p.kind, ProviderConfig::Kind::Offline);
  EXPECT_EQ(p.directory, fixtures() / "unparsable");
  auto h = provider_from_json(nlohmann::json::parse(
      R"({"endpoint": "http://127.0.0.1:9/v1/completions", "model": "m", "n": 4})"));
  EXPECT_EQ(h.kind, ProviderConfig::Kind::Http);
  EXPECT_EQ(h.n, 4u);
  EXPECT_EQ(provider_from_json(provider_to_json(h)).endpoint, h.endpoint);
  EXPECT_THROW(provider_from_json(nlohmann::json::parse(R"({"n": 3})")), ProviderError);
  EXPECT_THROW(provider_from_json(nlohmann::json::parse(R"({"directory": "x", "n": 0})")),
               ProviderError);
}

TEST(CompleteSource, CutsAfterTheBody) {
  std::string prompt = "fn f(x: Int) -> Int {\n    \"\"\"Has a } brace.\"\"\"\n";
  auto src = complete_source(prompt, "    return x; # }\n}\n\nfn g() -> Int { return 1; }\n");
  EXPECT_EQ(src, prompt + "    return x; # }\n}\n");
  EXPECT_NO_THROW(testing::checked(src));
  auto whole = complete_source(prompt, "\nfn f(x: Int) -> Int { return \"}\" == \"\" ; }");
  EXPECT_EQ(whole, "fn f(x: Int) -> Int { return \"}\" == \"\" ; }\n");
}

// ---- HTTP ----------------------------------------------------------------

class StubServer {
 public:
  std::function<void(const httplib::Request&, httplib::Response&)> handler;
  std::atomic<int> hits{0};
  nlohmann::json last_body;
  std::string last_auth;

  StubServer() {
    server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_body = nlohmann::json::parse(req.body, nullptr, false);
      last_auth = req.get_header_value("Authorization");
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  ProviderConfig config() const {
    ProviderConfig p;
    p.kind = ProviderConfig::Kind::Http;
    p.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/completions";
    p.model = "code-model";
    p.timeout_seconds = 5;
    return p;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Http, RecordedResponseYieldsTenSources) {
  StubServer stub;
  auto recorded = slurp(fixtures() / "http" / "first_nonzero_n10.json");
  stub.handler = [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(recorded, "application/json");
  };
  ::setenv("DISAMBIG_TEST_KEY", "sk-test", 1);
  auto p = stub.config();
  p.api_key_env = "DISAMBIG_TEST_KEY";
  auto spec = sp1();
  auto prompt = build_prompt(spec);
  auto sources = fetch_candidates(prompt, 10, p);
  ASSERT_EQ(sources.size(), 10u);
  EXPECT_EQ(sources[0].label, "choice-0");
  EXPECT_EQ(stub.last_body["n"], 10);
  EXPECT_EQ(stub.last_body["prompt"], prompt);
  EXPECT_EQ(stub.last_body["model"], "code-model");
  EXPECT_EQ(stub.last_auth, "Bearer sk-test");

  auto v = validate_and_dedupe(sources, spec, Origin::Llm);
  // 5 distinct programs; 3 duplicates (one with trailing text, one whole
  // definition, one reformatted) and 2 invalid completions.
  EXPECT_EQ(v.candidates.size(), 5u);
  EXPECT_EQ(v.diagnostics.size(), 5u);
  for (const auto& c : v.candidates) EXPECT_EQ(c.origin, Origin::Llm);
}

TEST(Http, ChatStyleChoices) {
  StubServer stub;
  stub.handler = [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices": [{"message": {"content": "    return 1.0;\n}\n"}}]})",
                    "application/json");
  };
  auto sources = fetch_candidates(build_prompt(sp1()), 1, stub.config());
  ASSERT_EQ(sources.size(), 1u);
  EXPECT_NO_THROW(testing::checked(sources[0].text));
}

TEST(Http, ErrorMapping) {
  StubServer stub;
  auto p = stub.config();
  auto kind_of = [&](int status, const std::string& body) {
    stub.handler = [=](const httplib::Request&, httplib::Response& res) {
      res.status = status;
      res.set_content(body, "application/json");
    };
    try {
      fetch_candidates("fn f() -> Int {\n", 2, p);
    } catch (const ProviderError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  EXPECT_EQ(kind_of(401, "{}"), static_cast<int>(ProviderError::Kind::AuthFailure));
  EXPECT_EQ(kind_of(403, "{}"), static_cast<int>(ProviderError::Kind::AuthFailure));
  EXPECT_EQ(kind_of(200, "not json"), static_cast<int>(ProviderError::Kind::MalformedResponse));
  EXPECT_EQ(kind_of(200, R"({"data": []})"),
            static_cast<int>(ProviderError::Kind::MalformedResponse));
  EXPECT_EQ(kind_of(404, "{}"), static_cast<int>(ProviderError::Kind::MalformedResponse));
  int before = stub.hits;
  EXPECT_EQ(kind_of(503, "{}"), static_cast<int>(ProviderError::Kind::Unreachable));
  EXPECT_EQ(stub.hits - before, 2) << "a 5xx is retried once";
}

TEST(Http, RetryRecoversFromOneFailure) {
  StubServer stub;
  stub.handler = [&](const httplib::Request&, httplib::Response& res) {
    if (stub.hits == 1) {
      res.status = 502;
      return;
    }
    res.set_content(R"({"choices": [{"text": "    return 0.0;\n}\n"}]})", "application/json");
  };
  EXPECT_EQ(fetch_candidates(build_prompt(sp1()), 1, stub.config()).size(), 1u);
  EXPECT_EQ(stub.hits, 2);
}

TEST(Http, MissingKeyAndDeadEndpoint) {
  ProviderConfig p;
  p.kind = ProviderConfig::Kind::Http;
  p.endpoint = "http://127.0.0.1:1/v1/completions";
  p.timeout_seconds = 1;
  p.api_key_env = "DISAMBIG_SURELY_UNSET_VARIABLE";
  try {
    fetch_candidates("", 1, p);
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ProviderError::Kind::AuthFailure);
  }
  p.api_key_env.clear();
  try {
    fetch_candidates("", 1, p);
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ProviderError::Kind::Unreachable);
  }
}

}  // namespace
}  // namespace disambig::acquisition
