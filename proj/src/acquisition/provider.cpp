#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "disambig/acquisition.hpp"

namespace disambig::acquisition {

using nlohmann::json;
namespace fs = std::filesystem;

ProviderConfig provider_from_json(const json& j) {
  if (!j.is_object()) {
    throw ProviderError(ProviderError::Kind::MalformedResponse,
                        "provider config must be a JSON object");
  }
  ProviderConfig p;
  try {
    if (j.contains("directory")) {
      p.kind = ProviderConfig::Kind::Offline;
      p.directory = j["directory"].get<std::string>();
    } else {
      p.kind = ProviderConfig::Kind::Http;
      p.endpoint = j.at("endpoint").get<std::string>();
      p.model = j.value("model", "");
      p.api_key_env = j.value("api_key_env", "");
      p.temperature = j.value("temperature", 0.8);
      p.timeout_seconds = j.value("timeout", 30.0);
    }
    p.n = j.value("n", std::size_t{10});
  } catch (const json::exception& e) {
    throw ProviderError(ProviderError::Kind::MalformedResponse,
                        std::string("provider config: ") + e.what());
  }
  if (p.n == 0) {
    throw ProviderError(ProviderError::Kind::MalformedResponse, "provider n must be >= 1");
  }
  return p;
}

ProviderConfig load_provider_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ProviderError(ProviderError::Kind::Unreachable, "cannot read " + path.string());
  }
  try {
    auto p = provider_from_json(json::parse(in));
    if (p.kind == ProviderConfig::Kind::Offline && p.directory.is_relative()) {
      p.directory = path.parent_path() / p.directory;
    }
    return p;
  } catch (const json::parse_error& e) {
    throw ProviderError(ProviderError::Kind::MalformedResponse,
                        path.string() + ": " + e.what());
  }
}

json provider_to_json(const ProviderConfig& p) {
  if (p.kind == ProviderConfig::Kind::Offline) {
    return {{"directory", p.directory.generic_string()}, {"n", p.n}};
  }
  return {{"endpoint", p.endpoint},       {"model", p.model},
          {"api_key_env", p.api_key_env}, {"temperature", p.temperature},
          {"timeout", p.timeout_seconds}, {"n", p.n}};
}

std::string complete_source(std::string_view prompt, std::string_view completion) {
  std::string_view head = completion;
  while (!head.empty() && (head.front() == ' ' || head.front() == '\n' ||
                           head.front() == '\r' || head.front() == '\t')) {
    head.remove_prefix(1);
  }
  std::string text = head.starts_with("fn ") ? std::string(head)
                                              : std::string(prompt) + std::string(completion);
  // Cut after the brace closing the first `{`, skipping strings, comments and
  // doc blocks.
  int depth = 0;
  bool opened = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (text.compare(i, 3, "\"\"\"") == 0) {
      auto end = text.find("\"\"\"", i + 3);
      if (end == std::string::npos) return text;
      i = end + 2;
    } else if (c == '"') {
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') ++i;
      }
    } else if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      auto nl = text.find('\n', i);
      if (nl == std::string::npos) return text;
      i = nl;
    } else if (c == '{') {
      ++depth;
      opened = true;
    } else if (c == '}') {
      if (--depth == 0 && opened) return text.substr(0, i + 1) + "\n";
    }
  }
  return text;
}

namespace {

std::vector<RawSource> fetch_offline(std::size_t n, const ProviderConfig& p) {
  std::error_code ec;
  if (!fs::is_directory(p.directory, ec)) {
    throw ProviderError(ProviderError::Kind::Unreachable,
                        "corpus directory not found: " + p.directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(p.directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mfn") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.size() > n) files.resize(n);
  std::vector<RawSource> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back({f.stem().string(), ss.str()});
  }
  return out;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ProviderError(ProviderError::Kind::Unreachable, "endpoint is not a URL: " + url);
  }
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::vector<RawSource> fetch_http(const std::string& prompt, std::size_t n,
                                  const ProviderConfig& p) {
  auto ep = split_endpoint(p.endpoint);
  httplib::Headers headers;
  if (!p.api_key_env.empty()) {
    const char* key = std::getenv(p.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ProviderError(ProviderError::Kind::AuthFailure,
                          "environment variable " + p.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  json body = {{"model", p.model}, {"prompt", prompt}, {"n", n},
               {"temperature", p.temperature}};

  httplib::Result res{nullptr, httplib::Error::Unknown};
  for (int attempt = 0; attempt < 2; ++attempt) {
    httplib::Client cli(ep.origin);
    auto secs = static_cast<time_t>(p.timeout_seconds);
    auto usecs = static_cast<time_t>((p.timeout_seconds - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    res = cli.Post(ep.path, headers, body.dump(), "application/json");
    if (res && res->status < 500) break;
  }
  if (!res) {
    throw ProviderError(ProviderError::Kind::Unreachable,
                        p.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw ProviderError(ProviderError::Kind::AuthFailure,
                        p.endpoint + ": HTTP " + std::to_string(res->status));
  }
  if (res->status >= 500) {
    throw ProviderError(ProviderError::Kind::Unreachable,
                        p.endpoint + ": HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw ProviderError(ProviderError::Kind::MalformedResponse,
                        p.endpoint + ": HTTP " + std::to_string(res->status));
  }

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProviderError(ProviderError::Kind::MalformedResponse,
                        std::string("response is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("choices") || !reply["choices"].is_array()) {
    throw ProviderError(ProviderError::Kind::MalformedResponse,
                        "response has no 'choices' array");
  }
  std::vector<RawSource> out;
  for (const auto& choice : reply["choices"]) {
    if (out.size() >= n) break;
    const json* text = nullptr;
    if (choice.contains("text") && choice["text"].is_string()) {
      text = &choice["text"];
    } else if (choice.contains("message") && choice["message"].is_object() &&
               choice["message"].contains("content") &&
               choice["message"]["content"].is_string()) {
      text = &choice["message"]["content"];
    }
    if (text == nullptr) {
      throw ProviderError(ProviderError::Kind::MalformedResponse,
                          "choice without text: " + choice.dump());
    }
    out.push_back({"choice-" + std::to_string(out.size()),
                   complete_source(prompt, text->get<std::string>())});
  }
  return out;
}

}  // namespace

std::vector<RawSource> fetch_candidates(const std::string& prompt, std::size_t n,
                                        const ProviderConfig& provider) {
  if (n == 0) return {};
  if (provider.kind == ProviderConfig::Kind::Offline) return fetch_offline(n, provider);
  return fetch_http(prompt, n, provider);
}

}  // namespace disambig::acquisition
