#pragma once

#include <memory>
#include <string>
#include <vector>

#include "guiflow/episode.hpp"

namespace guiflow {

// Line-oriented bidirectional byte stream to an external agent process or
// server. Implementations own their file descriptors.
class Transport {
 public:
  virtual ~Transport() = default;
  // Sends one line, newline appended. Throws TransportClosedError.
  virtual void send_line(const std::string& line) = 0;
  // Receives one line, newline stripped. Throws TimeoutError after
  // timeout_seconds without a complete line, TransportClosedError on EOF.
  virtual std::string recv_line(double timeout_seconds) = 0;
};

// Child process speaking the protocol on its standard streams. The argv
// vector is exec'd directly, no shell involved.
class ProcessTransport : public Transport {
 public:
  explicit ProcessTransport(const std::vector<std::string>& argv);
  ~ProcessTransport() override;

  void send_line(const std::string& line) override;
  std::string recv_line(double timeout_seconds) override;

 private:
  int in_fd_ = -1;   // child's stdout, read side
  int out_fd_ = -1;  // child's stdin, write side
  int pid_ = -1;
  std::string buffer_;
};

// TCP client connection to an agent server.
class TcpTransport : public Transport {
 public:
  TcpTransport(const std::string& host, int port);
  ~TcpTransport() override;

  void send_line(const std::string& line) override;
  std::string recv_line(double timeout_seconds) override;

 private:
  int fd_ = -1;
  std::string buffer_;
};

struct BridgeConfig {
  double timeout_seconds = 10.0;
};

// Wire protocol (one JSON object per line, "v" = 1):
//   request:  {"v":1,"task":...,"step_index":N,
//              "page":{"page_id":...,"xml":...[,"screenshot_ref":...]},
//              "action_space":[...],"history":[...]}
//   response: {"action": <serialized action>}
// The full byte-level contract lives in docs/agent_protocol.md.
class BridgeAgent : public Agent {
 public:
  explicit BridgeAgent(std::unique_ptr<Transport> transport,
                       BridgeConfig cfg = {});

  Action decide(const std::string& task, const GuiPage& page,
                const std::vector<Action>& action_space,
                const std::vector<Action>& history) override;

 private:
  std::unique_ptr<Transport> transport_;
  BridgeConfig cfg_;
};

// Builds the request line for one step; exposed so tests and the protocol
// document stay pinned to the exact bytes.
std::string bridge_request_line(const std::string& task, int step_index,
                                const GuiPage& page,
                                const std::vector<Action>& action_space,
                                const std::vector<Action>& history);

// Parses a response line into an action. Throws MalformedResponseError.
Action bridge_parse_response(const std::string& line);

}  // namespace guiflow
