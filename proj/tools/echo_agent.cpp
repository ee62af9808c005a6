// Minimal NDJSON agent used to exercise the bridge in tests and demos. Reads
// request lines, answers {"action": <first entry of action_space>}. The
// failure modes are deliberate: "silent" swallows requests so callers hit
// their timeout, "garbage" replies with a non-JSON line.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using json = nlohmann::ordered_json;

bool read_line_fd(int fd, std::string* buffer, std::string* line) {
  while (true) {
    const std::size_t nl = buffer->find('\n');
    if (nl != std::string::npos) {
      *line = buffer->substr(0, nl);
      buffer->erase(0, nl + 1);
      if (!line->empty() && line->back() == '\r') line->pop_back();
      return true;
    }
    char chunk[4096];
    const ssize_t n = ::read(fd, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("read failed: ") +
                               std::strerror(errno));
    }
    if (n == 0) return false;
    buffer->append(chunk, static_cast<std::size_t>(n));
  }
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("write failed: ") +
                               std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

int serve(int in_fd, int out_fd, const std::string& mode) {
  std::string buffer;
  std::string line;
  while (read_line_fd(in_fd, &buffer, &line)) {
    if (mode == "silent") {
      // Hold the connection open without answering.
      std::this_thread::sleep_for(std::chrono::seconds(3600));
      return 0;
    }
    if (mode == "garbage") {
      write_all(out_fd, "this is not json\n");
      continue;
    }
    const json request = json::parse(line);
    json action;
    if (request.contains("action_space") && request["action_space"].is_array() &&
        !request["action_space"].empty()) {
      action = request["action_space"][0];
    } else {
      action = {{"kind", "complete"}, {"text", ""}};
    }
    json response;
    response["action"] = std::move(action);
    write_all(out_fd, response.dump() + "\n");
  }
  return 0;
}

int serve_tcp(int port, const std::string& mode) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) {
    std::cerr << "socket failed: " << std::strerror(errno) << "\n";
    return 1;
  }
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    std::cerr << "bind failed: " << std::strerror(errno) << "\n";
    ::close(listener);
    return 1;
  }
  if (::listen(listener, 1) < 0) {
    std::cerr << "listen failed: " << std::strerror(errno) << "\n";
    ::close(listener);
    return 1;
  }
  // Report readiness so test drivers can connect without polling. Resolve
  // the bound port instead of echoing the request so --listen 0 works.
  sockaddr_in bound{};
  socklen_t bound_len = sizeof(bound);
  if (::getsockname(listener, reinterpret_cast<sockaddr*>(&bound),
                    &bound_len) == 0) {
    port = ntohs(bound.sin_port);
  }
  std::cout << "listening " << port << std::endl;
  const int conn = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (conn < 0) {
    std::cerr << "accept failed: " << std::strerror(errno) << "\n";
    return 1;
  }
  const int rc = serve(conn, conn, mode);
  ::close(conn);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echo agent: answers every bridge request with the first "
               "action in the offered space"};
  int listen_port = -1;
  std::string mode = "first";
  app.add_option("--listen", listen_port, "serve one TCP connection on port");
  app.add_option("--mode", mode, "first|silent|garbage")
      ->check(CLI::IsMember({"first", "silent", "garbage"}));
  CLI11_PARSE(app, argc, argv);

  try {
    if (listen_port >= 0) return serve_tcp(listen_port, mode);
    return serve(STDIN_FILENO, STDOUT_FILENO, mode);
  } catch (const std::exception& e) {
    std::cerr << "echo_agent: " << e.what() << "\n";
    return 1;
  }
}
