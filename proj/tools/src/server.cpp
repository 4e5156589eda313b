#include "hexwar_tools/server.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "hexwar/policy_factory.hpp"
#include "hexwar/session.hpp"

namespace hexwar::tools {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct PlayServer::Impl {
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
};

PlayServer::PlayServer(ServerConfig cfg) : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {}

PlayServer::~PlayServer() { stop(); }

void PlayServer::start() {
  // Fail fast on a bad red policy rather than on the first connection.
  make_policy(cfg_.red_policy, Faction::red);
  beast::error_code ec;
  const tcp::endpoint ep{asio::ip::make_address("127.0.0.1"), cfg_.port};
  impl_->acceptor.open(ep.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(ep, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw std::runtime_error("cannot listen on port " + std::to_string(cfg_.port) + ": " +
                             ec.message());
  }
  port_ = impl_->acceptor.local_endpoint().port();
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void PlayServer::stop() {
  if (!running_.exchange(false)) return;
  beast::error_code ec;
  {
    // A blocking accept() is not woken by close(); poke it with a connection.
    asio::io_context ioc;
    tcp::socket poke(ioc);
    poke.connect({asio::ip::make_address("127.0.0.1"), port_}, ec);
  }
  if (acceptor_.joinable()) acceptor_.join();
  impl_->acceptor.cancel(ec);
  impl_->acceptor.close(ec);
  std::lock_guard lock(workers_mu_);
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

void PlayServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void PlayServer::accept_loop() {
  while (running_) {
    auto socket = std::make_unique<tcp::socket>(impl_->ioc);
    beast::error_code ec;
    impl_->acceptor.accept(*socket, ec);
    if (!running_) break;
    if (ec) continue;
    const std::uint64_t index = next_session_++;
    std::lock_guard lock(workers_mu_);
    workers_.emplace_back([this, index, s = socket.release()] {
      std::unique_ptr<tcp::socket> owned(s);
      serve_connection(index, owned.get());
    });
  }
}

namespace {

http::response<http::string_body> json_response(const http::request<http::string_body>& req,
                                                http::status status, const nlohmann::json& body) {
  http::response<http::string_body> res{status, req.version()};
  res.set(http::field::content_type, "application/json");
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(false);
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

void persist(const std::filesystem::path& dir, std::uint64_t index, const EpisodeLog& log) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / ("session-" + std::to_string(index) + ".ndjson"));
  write_log(out, log);
}

}  // namespace

void PlayServer::serve_connection(std::uint64_t index, void* raw_socket) {
  auto& socket = *static_cast<tcp::socket*>(raw_socket);
  beast::error_code ec;
  beast::flat_buffer buffer;
  http::request<http::string_body> req;
  http::read(socket, buffer, req, ec);
  if (ec) return;

  if (!websocket::is_upgrade(req)) {
    http::response<http::string_body> res;
    if (req.method() == http::verb::get && req.target() == "/health") {
      res = json_response(req, http::status::ok, {{"status", "ok"}});
    } else if (req.method() == http::verb::get && req.target() == "/scenarios") {
      res = json_response(req, http::status::ok,
                          {{"scenarios", nlohmann::json::array({cfg_.scenario.name()})}});
    } else {
      res = json_response(req, http::status::not_found,
                          {{"type", "error"}, {"code", "not_found"}, {"msg", "no such endpoint"}});
    }
    http::write(socket, res, ec);
    socket.shutdown(tcp::socket::shutdown_send, ec);
    return;
  }
  if (req.target() != "/play") {
    auto res = json_response(req, http::status::not_found,
                             {{"type", "error"}, {"code", "not_found"}, {"msg", "upgrade on /play only"}});
    http::write(socket, res, ec);
    return;
  }

  websocket::stream<tcp::socket&> ws(socket);
  ws.accept(req, ec);
  if (ec) return;
  ws.text(true);

  PlaySession session(cfg_.scenario, make_policy(cfg_.red_policy, Faction::red),
                      cfg_.seed + index);
  auto send_all = [&](const std::vector<nlohmann::json>& msgs) {
    for (const auto& m : msgs) {
      const std::string line = m.dump() + "\n";
      ws.write(asio::buffer(line), ec);
      if (ec) return false;
    }
    return true;
  };

  bool alive = send_all(session.start());
  while (alive && !session.finished()) {
    beast::flat_buffer in;
    ws.read(in, ec);
    if (ec) break;
    std::istringstream lines(beast::buffers_to_string(in.data()));
    std::string line;
    while (alive && std::getline(lines, line)) {
      if (line.empty()) continue;
      alive = send_all(session.handle(line));
      if (session.finished()) break;
    }
  }
  if (!session.finished()) session.disconnect();
  persist(cfg_.log_dir, index, session.log());
  if (alive) ws.close(websocket::close_code::normal, ec);
  ++completed_;
}

}  // namespace hexwar::tools
