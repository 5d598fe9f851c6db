#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "disambig/service.hpp"
#include "support.hpp"

namespace disambig::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::bench_dir;

json create_body() {
  return {{"spec", testing::slurp(bench_dir() / "first_nonzero/SP1.fnspec")},
          {"corpus", (bench_dir() / "first_nonzero/corpus/SP1").string()},
          {"config", {{"mutants", false}}}};
}

std::set<std::string> calls(const json& view) {
  std::set<std::string> out;
  for (const auto& w : view["report"]["witnesses"]) out.insert(w["call"].get<std::string>());
  return out;
}

class Api : public ::testing::Test {
 protected:
  ServiceOptions options;
  std::unique_ptr<SessionStore> store;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void SetUp() override {
    store = std::make_unique<SessionStore>(options);
    install_routes(server, *store, options);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  void TearDown() override {
    server.stop();
    thread.join();
  }
  httplib::Client client() { return httplib::Client("127.0.0.1", port); }
  std::pair<int, json> post(const std::string& path, const std::string& body) {
    auto res = client().Post(path, body, "application/json");
    EXPECT_TRUE(res);
    if (!res) return {0, {}};
    return {res->status, json::parse(res->body, nullptr, false)};
  }
  std::pair<int, json> post(const std::string& path, const json& body) {
    return post(path, body.dump());
  }
};

TEST_F(Api, CreateGetAndAnswer) {
  auto [status, created] = post("/sessions", create_body());
  ASSERT_EQ(status, 200) << created.dump();
  std::string id = created["id"];
  EXPECT_TRUE(calls(created).count("first_nonzero([])"));
  EXPECT_TRUE(calls(created).count("first_nonzero([nan])"));
  EXPECT_TRUE(created["history"].empty());

  auto got = client().Get("/sessions/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->status, 200);
  EXPECT_EQ(json::parse(got->body)["report"], created["report"]);

  auto [s2, answered] = post("/sessions/" + id + "/examples",
                             json::parse(R"({"args": [[]], "expected": {"kind": "value",
                                              "value": 0.0}})"));
  ASSERT_EQ(s2, 200) << answered.dump();
  EXPECT_FALSE(calls(answered).count("first_nonzero([])"));
  ASSERT_EQ(answered["history"].size(), 1u);
  EXPECT_FALSE(answered["history"][0]["timestamp"].get<std::string>().empty());
  EXPECT_LT(answered["report"]["candidates"].size(), created["report"]["candidates"].size());
}

TEST_F(Api, ErrorStatuses) {
  EXPECT_EQ(client().Get("/sessions/nope")->status, 404);
  EXPECT_EQ(post("/sessions/nope/examples", json::object()).first, 404);
  EXPECT_EQ(post("/sessions", std::string("{not json")).first, 400);
  EXPECT_EQ(post("/sessions", json{{"corpus", "x"}}).first, 400);
  auto bad_spec = create_body();
  bad_spec["spec"] = "fn (";
  EXPECT_EQ(post("/sessions", bad_spec).first, 400);
  auto bad_config = create_body();
  bad_config["config"] = {{"fuel", 0}};
  EXPECT_EQ(post("/sessions", bad_config).first, 400);
  auto missing = create_body();
  missing["corpus"] = "/nonexistent/corpus";
  EXPECT_EQ(post("/sessions", missing).first, 502);

  auto [status, created] = post("/sessions", create_body());
  ASSERT_EQ(status, 200);
  std::string base = "/sessions/" + created["id"].get<std::string>();
  // Nobody returns 42.0 on [], so the answer would empty the space.
  auto [s409, body409] =
      post(base + "/examples",
           json::parse(R"({"args": [[]], "expected": {"kind": "value", "value": 42.0}})"));
  EXPECT_EQ(s409, 409);
  EXPECT_TRUE(body409.contains("error"));
  EXPECT_EQ(post(base + "/examples", json::parse(R"({"args": [1]})")).first, 400);
  EXPECT_EQ(post(base + "/purpose", json::parse(R"({"purpose": 3})")).first, 400);
}

TEST_F(Api, PurposeEdit) {
  auto [status, created] = post("/sessions", create_body());
  ASSERT_EQ(status, 200);
  std::string base = "/sessions/" + created["id"].get<std::string>();
  auto [s, edited] = post(base + "/purpose", json{{"purpose", "Skip NaN values."}});
  ASSERT_EQ(s, 200);
  EXPECT_EQ(edited["report"]["spec"]["purpose"], "Skip NaN values.");
  auto [s2, again] =
      post(base + "/purpose", json{{"purpose", "Return the first non-zero value."},
                                   {"reacquire", true}});
  ASSERT_EQ(s2, 200);
  EXPECT_FALSE(again["report"]["witnesses"].empty());
}

TEST_F(Api, CorsOnlyForLocalOrigins) {
  httplib::Headers local{{"Origin", "http://localhost:5173"}};
  auto res = client().Get("/healthz", local);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  auto pre = client().Options("/sessions", local);
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"),
            std::string::npos);
  auto remote = client().Get("/healthz", httplib::Headers{{"Origin", "http://evil.example"}});
  ASSERT_TRUE(remote);
  EXPECT_FALSE(remote->has_header("Access-Control-Allow-Origin"));
  auto lookalike =
      client().Get("/healthz", httplib::Headers{{"Origin", "http://localhost.evil.example"}});
  EXPECT_FALSE(lookalike->has_header("Access-Control-Allow-Origin"));
}

TEST(Persistence, SnapshotsReplayAfterRestart) {
  auto dir = fs::temp_directory_path() / "disambig_state_test";
  fs::remove_all(dir);
  ServiceOptions options;
  options.state_dir = dir;
  json before;
  std::string id;
  {
    SessionStore store(options);
    auto created = store.create(create_body());
    id = created["id"];
    store.add_example(id, json::parse(R"({"args": [[]], "expected": {"kind": "error"}})"));
    before = store.get(id);
  }
  EXPECT_TRUE(fs::exists(dir / (id + ".json")));
  SessionStore fresh(options);
  EXPECT_EQ(fresh.load_snapshots(), 1u);
  EXPECT_EQ(fresh.size(), 1u);
  auto after = fresh.get(id);
  EXPECT_EQ(after["report"], before["report"]);
  EXPECT_EQ(after["history"], before["history"]);

  std::ofstream(dir / "zz_broken.json") << "{\"id\": \"x\"}";
  SessionStore skipping(options);
  EXPECT_EQ(skipping.load_snapshots(), 1u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace disambig::service
