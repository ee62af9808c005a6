#include "guiflow/bridge.hpp"

#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "guiflow/errors.hpp"
#include "guiflow/io.hpp"

namespace guiflow {

namespace {

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportClosedError(std::string("write failed: ") +
                                 std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

// Reads one '\n'-terminated line from fd, carrying leftovers in `buffer`
// across calls. The deadline covers the whole line, not each chunk.
std::string read_line_fd(int fd, std::string& buffer, double timeout_seconds) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
  for (;;) {
    const std::size_t nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = deadline - std::chrono::steady_clock::now();
    const int ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(remaining)
            .count());
    if (ms <= 0) throw TimeoutError("timed out waiting for agent response");

    struct pollfd pfd{fd, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportClosedError(std::string("poll failed: ") +
                                 std::strerror(errno));
    }
    if (rc == 0) throw TimeoutError("timed out waiting for agent response");

    char chunk[4096];
    const ssize_t n = ::read(fd, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportClosedError(std::string("read failed: ") +
                                 std::strerror(errno));
    }
    if (n == 0) throw TransportClosedError("agent closed the connection");
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace

ProcessTransport::ProcessTransport(const std::vector<std::string>& argv) {
  if (argv.empty()) throw ConfigError("empty agent command");
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw AgentError(std::string("pipe failed: ") + std::strerror(errno));
  }
  const int pid = ::fork();
  if (pid < 0) {
    throw AgentError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const std::string& a : argv) {
      cargv.push_back(const_cast<char*>(a.c_str()));
    }
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    // Still in the child: exec failed. Nothing useful to clean up.
    ::perror("execvp");
    ::_exit(127);
  }
  pid_ = pid;
  out_fd_ = to_child[1];
  in_fd_ = from_child[0];
  ::close(to_child[0]);
  ::close(from_child[1]);
  // A dead child must surface as TransportClosed on write, not SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);
}

ProcessTransport::~ProcessTransport() {
  if (out_fd_ >= 0) ::close(out_fd_);
  if (in_fd_ >= 0) ::close(in_fd_);
  if (pid_ > 0) {
    // EOF on stdin asks the agent to exit; escalate if it lingers.
    int status = 0;
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
}

void ProcessTransport::send_line(const std::string& line) {
  write_all(out_fd_, line + "\n");
}

std::string ProcessTransport::recv_line(double timeout_seconds) {
  return read_line_fd(in_fd_, buffer_, timeout_seconds);
}

TcpTransport::TcpTransport(const std::string& host, int port) {
  if (port <= 0 || port > 65535) {
    throw ConfigError("bad agent port: " + std::to_string(port));
  }
  struct addrinfo hints {};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* res = nullptr;
  const int rc =
      ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
  if (rc != 0) {
    throw AgentError("cannot resolve " + host + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (struct addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw AgentError("cannot connect to " + host + ":" + std::to_string(port));
  }
  fd_ = fd;
  ::signal(SIGPIPE, SIG_IGN);
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::send_line(const std::string& line) {
  write_all(fd_, line + "\n");
}

std::string TcpTransport::recv_line(double timeout_seconds) {
  return read_line_fd(fd_, buffer_, timeout_seconds);
}

BridgeAgent::BridgeAgent(std::unique_ptr<Transport> transport,
                         BridgeConfig cfg)
    : transport_(std::move(transport)), cfg_(cfg) {
  if (!transport_) throw ConfigError("bridge agent needs a transport");
  if (!(cfg_.timeout_seconds > 0.0)) {
    throw ConfigError("bridge timeout must be positive");
  }
}

std::string bridge_request_line(const std::string& task, int step_index,
                                const GuiPage& page,
                                const std::vector<Action>& action_space,
                                const std::vector<Action>& history) {
  json req;
  req["v"] = 1;
  req["task"] = task;
  req["step_index"] = step_index;
  json pg;
  pg["page_id"] = page.page_id;
  pg["xml"] = page.xml;
  if (page.screenshot_ref.has_value()) {
    pg["screenshot_ref"] = *page.screenshot_ref;
  }
  req["page"] = std::move(pg);
  json space = json::array();
  for (const Action& a : action_space) space.push_back(action_to_json(a));
  req["action_space"] = std::move(space);
  json hist = json::array();
  for (const Action& a : history) hist.push_back(action_to_json(a));
  req["history"] = std::move(hist);
  return req.dump();
}

Action bridge_parse_response(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedResponseError(std::string("agent response is not JSON: ") +
                                 e.what());
  }
  if (!j.is_object() || !j.contains("action")) {
    throw MalformedResponseError("agent response missing 'action' field");
  }
  try {
    return action_from_json(j.at("action"));
  } catch (const DataError& e) {
    throw MalformedResponseError(std::string("bad action in response: ") +
                                 e.what());
  }
}

Action BridgeAgent::decide(const std::string& task, const GuiPage& page,
                           const std::vector<Action>& action_space,
                           const std::vector<Action>& history) {
  const int step_index = static_cast<int>(history.size());
  transport_->send_line(
      bridge_request_line(task, step_index, page, action_space, history));
  const std::string line = transport_->recv_line(cfg_.timeout_seconds);
  try {
    return bridge_parse_response(line);
  } catch (MalformedResponseError& e) {
    throw MalformedResponseError("step " + std::to_string(step_index) + ": " +
                                 e.what());
  }
}

}  // namespace guiflow
