#include "disambig/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>

#include <httplib.h>

#include "disambig/minifn/value_json.hpp"
#include "disambig/report.hpp"

namespace disambig::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

acquisition::FunctionSpec read_spec(const json& j) {
  try {
    return acquisition::spec_from_json(j);
  } catch (const acquisition::SpecError& e) {
    throw ApiError(400, std::string("bad spec: ") + e.what());
  } catch (const minifn::ValueDecodeError& e) {
    throw ApiError(400, std::string("bad spec: ") + e.what());
  }
}

// Runs fn, translating pipeline failures to HTTP statuses.
template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const engine::EmptySpaceError& e) {
    throw ApiError(409, e.what());
  } catch (const acquisition::ProviderError& e) {
    throw ApiError(502, e.what());
  } catch (const acquisition::SpecError& e) {
    throw ApiError(400, e.what());
  } catch (const std::invalid_argument& e) {
    throw ApiError(400, e.what());
  }
}

void run_initial(Session& s) {
  auto result = guarded([&] { return engine::run_pipeline(s.spec, s.provider, s.config); });
  s.space = std::move(result.space);
  s.report = std::move(result.report);
}

}  // namespace

SessionStore::SessionStore(ServiceOptions options) : options_(std::move(options)) {}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::string SessionStore::fresh_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%04llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(++counter_ & 0xffff));
  return buf;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session " + id);
  return it->second;
}

json SessionStore::view(const Session& s) {
  json history = json::array();
  for (const auto& h : s.history) {
    history.push_back({{"example", h.example}, {"timestamp", h.timestamp}});
  }
  return {{"id", s.id}, {"report", report::to_json(s.report)}, {"history", std::move(history)}};
}

void SessionStore::snapshot(const Session& s) const {
  if (options_.state_dir.empty()) return;
  json doc = {{"id", s.id}, {"create", s.created}, {"events", s.events}};
  fs::create_directories(options_.state_dir);
  auto tmp = options_.state_dir / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp);
    out << doc.dump(2) << "\n";
  }
  fs::rename(tmp, options_.state_dir / (s.id + ".json"));
}

json SessionStore::create(const json& body) {
  if (!body.is_object() || !body.contains("spec")) throw ApiError(400, "body needs 'spec'");
  auto s = std::make_shared<Session>();
  s->spec = read_spec(body["spec"]);
  if (body.contains("corpus") && body["corpus"].is_string()) {
    s->provider = acquisition::offline_provider(body["corpus"].get<std::string>());
  } else if (body.contains("provider")) {
    s->provider = guarded([&] { return acquisition::provider_from_json(body["provider"]); });
  } else {
    throw ApiError(400, "body needs 'corpus' or 'provider'");
  }
  json cfg = body.value("config", json::object());
  if (!cfg.is_object()) throw ApiError(400, "config must be an object");
  if (!cfg.contains("workers")) cfg["workers"] = options_.workers;
  s->config = guarded([&] { return engine::EngineConfig::from_json(cfg); });
  run_initial(*s);

  {
    std::lock_guard lock(mu_);
    s->id = body.contains("id") && body["id"].is_string() ? body["id"].get<std::string>()
                                                          : fresh_id();
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mu);
  s->created = body;
  s->created.erase("id");
  snapshot(*s);
  return view(*s);
}

json SessionStore::get(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return view(*s);
}

json SessionStore::add_example(const std::string& id, const json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  acquisition::FunctionalExample ex;
  try {
    ex = acquisition::example_from_json(body, s->spec);
  } catch (const minifn::ValueDecodeError& e) {
    throw ApiError(400, e.what());
  }
  bool anyone = false;
  for (const auto& c : s->space.candidates) {
    if (engine::satisfies(s->space, c, ex, s->config.fuel)) {
      anyone = true;
      break;
    }
  }
  if (!anyone) {
    throw ApiError(409, "this choice eliminates every candidate; no survivor produces it");
  }
  auto spec = s->spec;
  spec.examples.push_back(ex);
  spec.variant.reset();
  auto result =
      guarded([&] { return engine::refine(s->space, spec, s->report.witnesses, s->config); });
  s->spec = std::move(spec);
  s->space = std::move(result.space);
  s->report = std::move(result.report);
  auto stored = acquisition::example_to_json(ex);
  s->history.push_back({stored, utc_now()});
  s->events.push_back(
      {{"type", "example"}, {"example", stored}, {"timestamp", s->history.back().timestamp}});
  snapshot(*s);
  return view(*s);
}

json SessionStore::set_purpose(const std::string& id, const json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (!body.is_object() || !body.contains("purpose") || !body["purpose"].is_string()) {
    throw ApiError(400, "body needs a string 'purpose'");
  }
  std::string text = body["purpose"].get<std::string>();
  bool reacquire = body.value("reacquire", false);
  auto spec = s->spec;
  if (text.empty()) {
    spec.purpose.reset();
  } else {
    spec.purpose = text;
  }
  spec.variant.reset();
  if (reacquire) {
    Session fresh;
    fresh.spec = spec;
    fresh.provider = s->provider;
    fresh.config = s->config;
    run_initial(fresh);
    s->space = std::move(fresh.space);
    s->report = std::move(fresh.report);
  } else {
    s->report.spec = spec;
    s->space.spec = spec;
  }
  s->spec = std::move(spec);
  s->events.push_back({{"type", "purpose"}, {"purpose", text}, {"reacquire", reacquire}});
  snapshot(*s);
  return view(*s);
}

std::size_t SessionStore::load_snapshots() {
  if (options_.state_dir.empty() || !fs::is_directory(options_.state_dir)) return 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(options_.state_dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t loaded = 0;
  for (const auto& f : files) {
    try {
      std::ifstream in(f);
      json doc = json::parse(in);
      json body = doc.at("create");
      body["id"] = doc.at("id");
      auto view = create(body);
      std::string id = view.at("id").get<std::string>();
      for (const auto& ev : doc.value("events", json::array())) {
        if (ev.value("type", "") == "example") {
          add_example(id, ev.at("example"));
          if (ev.contains("timestamp")) {
            auto s = find(id);
            std::lock_guard lock(s->mu);
            s->history.back().timestamp = ev["timestamp"].get<std::string>();
            s->events.back()["timestamp"] = ev["timestamp"];
            snapshot(*s);
          }
        } else if (ev.value("type", "") == "purpose") {
          set_purpose(id, ev);
        }
      }
      ++loaded;
    } catch (const std::exception&) {
      // A snapshot that no longer replays (corpus moved, ...) is skipped.
    }
  }
  return loaded;
}

// ---- HTTP ----------------------------------------------------------------

namespace {

bool local_origin(const std::string& origin) {
  for (const char* prefix : {"http://localhost", "http://127.0.0.1", "https://localhost"}) {
    if (origin.rfind(prefix, 0) == 0) {
      auto rest = origin.substr(std::string(prefix).size());
      if (rest.empty() || rest[0] == ':' || rest[0] == '/') return true;
    }
  }
  return false;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  try {
    json body;
    if (!req.body.empty()) body = json::parse(req.body);
    reply(res, 200, fn(body));
  } catch (const ApiError& e) {
    reply(res, e.status(), {{"error", e.what()}});
  } catch (const json::exception& e) {
    reply(res, 400, {{"error", std::string("malformed JSON: ") + e.what()}});
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", e.what()}});
  }
}

}  // namespace

void install_routes(httplib::Server& server, SessionStore& store, const ServiceOptions& options) {
  server.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
    auto origin = req.get_header_value("Origin");
    if (local_origin(origin)) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  });
  server.Options(R"(.*)", [](const httplib::Request& req, httplib::Response& res) {
    auto origin = req.get_header_value("Origin");
    if (local_origin(origin)) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
    res.status = 204;
  });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok\n", "text/plain");
  });
  server.Post("/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json& body) { return store.create(body); });
  });
  server.Get(R"(/sessions/([0-9A-Za-z_-]+))",
             [&store](const httplib::Request& req, httplib::Response& res) {
               handle(req, res, [&](const json&) { return store.get(req.matches[1]); });
             });
  server.Post(R"(/sessions/([0-9A-Za-z_-]+)/examples)",
              [&store](const httplib::Request& req, httplib::Response& res) {
                handle(req, res,
                       [&](const json& body) { return store.add_example(req.matches[1], body); });
              });
  server.Post(R"(/sessions/([0-9A-Za-z_-]+)/purpose)",
              [&store](const httplib::Request& req, httplib::Response& res) {
                handle(req, res,
                       [&](const json& body) { return store.set_purpose(req.matches[1], body); });
              });
  if (!options.static_dir.empty()) server.set_mount_point("/", options.static_dir.string());
}

int serve(const ServiceOptions& options) {
  SessionStore store(options);
  store.load_snapshots();
  httplib::Server server;
  install_routes(server, store, options);
  if (!server.listen(options.host, options.port)) return 1;
  return 0;
}

}  // namespace disambig::service
