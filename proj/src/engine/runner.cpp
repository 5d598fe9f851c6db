#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include "disambig/engine.hpp"
#include "disambig/minifn/value_json.hpp"

namespace disambig::engine {

using nlohmann::json;

struct SubprocessRunner::Impl {
  std::vector<std::string> argv;
  double timeout_seconds;
  std::mutex mu;
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string pending;  // bytes read past the last newline

  void start() {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0) throw std::runtime_error("pipe failed");
    if (pipe(out_pipe) != 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      throw std::runtime_error("pipe failed");
    }
    std::vector<char*> cargv;
    for (auto& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);
    pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execvp(cargv[0], cargv.data());
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
    pending.clear();
  }

  void stop() {
    if (pid <= 0) return;
    close(to_child);
    close(from_child);
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    pid = -1;
    to_child = from_child = -1;
    pending.clear();
  }

  bool write_all(const std::string& s) {
    std::size_t off = 0;
    while (off < s.size()) {
      ssize_t w = write(to_child, s.data() + off, s.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      off += static_cast<std::size_t>(w);
    }
    return true;
  }

  enum class Read { Line, Timeout, Closed };

  Read read_line(std::string& line) {
    using clock = std::chrono::steady_clock;
    auto deadline = clock::now() + std::chrono::duration<double>(timeout_seconds);
    for (;;) {
      if (auto nl = pending.find('\n'); nl != std::string::npos) {
        line = pending.substr(0, nl);
        pending.erase(0, nl + 1);
        return Read::Line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
      if (left.count() <= 0) return Read::Timeout;
      pollfd pfd{from_child, POLLIN, 0};
      int r = poll(&pfd, 1, static_cast<int>(left.count()));
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) return Read::Timeout;
      char buf[4096];
      ssize_t got = read(from_child, buf, sizeof buf);
      if (got < 0 && errno == EINTR) continue;
      if (got <= 0) return Read::Closed;
      pending.append(buf, static_cast<std::size_t>(got));
    }
  }
};

SubprocessRunner::SubprocessRunner(std::vector<std::string> argv, double timeout_seconds)
    : impl_(std::make_unique<Impl>()) {
  if (argv.empty()) throw std::invalid_argument("runner command is empty");
  // A child that dies mid-write must not take the engine down with it.
  signal(SIGPIPE, SIG_IGN);
  impl_->argv = std::move(argv);
  impl_->timeout_seconds = timeout_seconds;
}

SubprocessRunner::~SubprocessRunner() { impl_->stop(); }

Outcome SubprocessRunner::call(const std::vector<Value>& args, const minifn::Type& return_type) {
  std::lock_guard lock(impl_->mu);
  auto& im = *impl_;
  if (im.pid <= 0) im.start();

  json req = {{"args", json::array()}};
  for (const auto& a : args) req["args"].push_back(minifn::to_json(a));
  auto fail = [&](const std::string& why) {
    im.stop();
    return Outcome::of_error(minifn::ErrorKind::UserRaised, "runner: " + why);
  };
  if (!im.write_all(req.dump() + "\n")) return fail("could not write request");

  std::string line;
  switch (im.read_line(line)) {
    case Impl::Read::Timeout:
      im.stop();
      return Outcome::exhausted();
    case Impl::Read::Closed:
      return fail("process exited");
    case Impl::Read::Line:
      break;
  }
  try {
    auto reply = json::parse(line);
    return minifn::outcome_from_json(reply.at("outcome"), return_type);
  } catch (const std::exception& e) {
    return fail(std::string("bad response: ") + e.what());
  }
}

}  // namespace disambig::engine
