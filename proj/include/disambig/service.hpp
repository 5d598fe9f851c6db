#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "disambig/engine.hpp"

namespace httplib {
class Server;
}

namespace disambig::service {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path state_dir;   // empty: no persistence
  std::filesystem::path static_dir;  // empty: API only
  std::size_t workers = 1;
};

// An HTTP-facing failure: status plus message.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct HistoryEntry {
  nlohmann::json example;  // FunctionalExample JSON
  std::string timestamp;   // UTC, ISO 8601
};

struct Session {
  std::string id;
  acquisition::FunctionSpec spec;
  acquisition::ProviderConfig provider;
  engine::EngineConfig config;
  engine::SuggestionSpace space;  // current survivors
  engine::Report report;
  std::vector<HistoryEntry> history;
  // Replay log for snapshots: the creation body and the edits since.
  nlohmann::json created;
  nlohmann::json events = nlohmann::json::array();
  std::mutex mu;
};

// Sessions keyed by id. Each session has its own lock, so a long re-run in
// one session does not block the others.
class SessionStore {
 public:
  explicit SessionStore(ServiceOptions options);

  // Body: {"spec": <.fnspec text or spec object>, "corpus": dir | "provider": {...},
  //        "config": {...}}. Returns {"id", "report"}.
  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json get(const std::string& id);
  // Body: {"args": [...], "expected": {"kind": "value", "value": v} | {"kind": "error"}}.
  nlohmann::json add_example(const std::string& id, const nlohmann::json& body);
  // Body: {"purpose": text, "reacquire": bool}.
  nlohmann::json set_purpose(const std::string& id, const nlohmann::json& body);

  // Re-creates every session snapshot found in the state directory.
  std::size_t load_snapshots();
  std::size_t size() const;

 private:
  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;

  std::shared_ptr<Session> find(const std::string& id);
  std::string fresh_id();
  void snapshot(const Session& s) const;
  static nlohmann::json view(const Session& s);
};

// Registers the routes (and CORS handling for localhost origins) on server.
void install_routes(httplib::Server& server, SessionStore& store,
                    const ServiceOptions& options);

// Blocks serving until the process is stopped. Returns nonzero if the socket
// cannot be bound.
int serve(const ServiceOptions& options);

}  // namespace disambig::service
