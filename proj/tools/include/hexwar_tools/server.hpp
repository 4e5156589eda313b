#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "hexwar/scenario.hpp"

namespace hexwar::tools {

struct ServerConfig {
  Scenario scenario;
  std::string red_policy = "greedy";
  std::uint64_t seed = 0;
  unsigned short port = 8080;  // 0 picks a free port
  std::filesystem::path log_dir;  // session logs land here when non-empty
};

// HTTP + WebSocket front end:
//   GET /health     -> {"status":"ok"}
//   GET /scenarios  -> {"scenarios":[name]}
//   /play           -> WebSocket upgrade; one PlaySession per connection,
//                      newline-delimited JSON in text frames.
class PlayServer {
 public:
  explicit PlayServer(ServerConfig cfg);
  ~PlayServer();

  PlayServer(const PlayServer&) = delete;
  PlayServer& operator=(const PlayServer&) = delete;

  // Binds and starts accepting in the background. Throws std::runtime_error
  // when the port cannot be bound.
  void start();
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

  unsigned short port() const { return port_; }
  std::size_t sessions_completed() const { return completed_.load(); }

 private:
  struct Impl;
  void accept_loop();
  void serve_connection(std::uint64_t index, void* socket);

  ServerConfig cfg_;
  std::unique_ptr<Impl> impl_;
  unsigned short port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> next_session_{0};
  std::atomic<std::size_t> completed_{0};
  std::thread acceptor_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
};

}  // namespace hexwar::tools
