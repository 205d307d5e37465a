#include "armtwin/net.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <mutex>
#include <system_error>
#include <vector>

namespace armtwin {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;

namespace {

// Observers that fall this far behind are dropped instead of buffering
// without bound.
constexpr std::size_t kMaxOutbox = 4096;

tcp::endpoint resolve_endpoint(asio::io_context& ioc, const std::string& host,
                               std::uint16_t port) {
  tcp::resolver resolver(ioc);
  return *resolver.resolve(host, std::to_string(port)).begin();
}

void open_acceptor(tcp::acceptor& acceptor, const tcp::endpoint& ep) {
  acceptor.open(ep.protocol());
  acceptor.set_option(asio::socket_base::reuse_address(true));
  acceptor.bind(ep);
  acceptor.listen();
}

std::system_error to_std(const boost::system::system_error& e, const std::string& what) {
  return std::system_error(std::error_code(e.code().value(), std::system_category()), what);
}

// Line writer with a bounded queue; one async_write in flight at a time.
class LineSink : public std::enable_shared_from_this<LineSink> {
 public:
  explicit LineSink(tcp::socket socket) : socket_(std::move(socket)) {}

  bool alive() const { return alive_; }

  void push(std::string line) {
    if (!alive_) return;
    if (outbox_.size() >= kMaxOutbox) {
      shutdown();
      return;
    }
    outbox_.push_back(std::move(line));
    if (outbox_.size() == 1) write_next();
  }

  void shutdown() {
    alive_ = false;
    boost::system::error_code ignored;
    socket_.close(ignored);
  }

 private:
  void write_next() {
    asio::async_write(socket_, asio::buffer(outbox_.front()),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                        if (ec) {
                          self->alive_ = false;
                          return;
                        }
                        self->outbox_.pop_front();
                        if (!self->outbox_.empty()) self->write_next();
                      });
  }

  tcp::socket socket_;
  std::deque<std::string> outbox_;
  bool alive_ = true;
};

}  // namespace

// ---------------------------------------------------------------------------
// Slave

struct SlaveServer::Impl {
  explicit Impl(const Config& cfg)
      : config(cfg),
        command_acceptor(ioc),
        telemetry_acceptor(ioc),
        ticker(ioc),
        signals(ioc),
        node(cfg.arm) {
    try {
      open_acceptor(command_acceptor, resolve_endpoint(ioc, cfg.net.host, cfg.net.command_port));
      open_acceptor(telemetry_acceptor,
                    resolve_endpoint(ioc, cfg.net.host, cfg.net.telemetry_port));
    } catch (const boost::system::system_error& e) {
      throw to_std(e, "slave: cannot listen on " + cfg.net.host);
    }
  }

  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }

  void publish(const TelemetryRecord& record) {
    {
      std::lock_guard lock(state_mutex);
      latest = record;
      rejects = node.reject_count();
    }
    const std::string line = encode_telemetry(record);
    std::erase_if(observers, [](const auto& o) { return !o->alive(); });
    for (auto& o : observers) o->push(line);
  }

  void accept_commands() {
    command_acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;
      read_commands(std::make_shared<tcp::socket>(std::move(socket)),
                    std::make_shared<asio::streambuf>());
      accept_commands();
    });
  }

  void read_commands(std::shared_ptr<tcp::socket> socket, std::shared_ptr<asio::streambuf> buf) {
    asio::async_read_until(*socket, *buf, '\n',
                           [this, socket, buf](boost::system::error_code ec, std::size_t n) {
                             if (ec) return;
                             std::string line(asio::buffer_cast<const char*>(buf->data()), n);
                             buf->consume(n);
                             publish(node.tick(line, now()));
                             read_commands(socket, buf);
                           });
  }

  void accept_observers() {
    telemetry_acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto sink = std::make_shared<LineSink>(std::move(socket));
      sink->push(encode_telemetry(node.telemetry(now())));
      observers.push_back(std::move(sink));
      accept_observers();
    });
  }

  void schedule_tick() {
    next_tick += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(config.arm.dt));
    ticker.expires_at(next_tick);
    ticker.async_wait([this](boost::system::error_code ec) {
      if (ec) return;
      if (!node.servo().settled()) publish(node.step(config.arm.dt, now()));
      schedule_tick();
    });
  }

  Config config;
  asio::io_context ioc;
  tcp::acceptor command_acceptor;
  tcp::acceptor telemetry_acceptor;
  asio::steady_timer ticker;
  asio::signal_set signals;
  SlaveNode node;
  std::vector<std::shared_ptr<LineSink>> observers;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point next_tick = started;

  mutable std::mutex state_mutex;
  TelemetryRecord latest;
  int rejects = 0;
};

SlaveServer::SlaveServer(const Config& config) : impl_(std::make_unique<Impl>(config)) {
  impl_->latest = impl_->node.telemetry(0.0);
}

SlaveServer::~SlaveServer() = default;

std::uint16_t SlaveServer::command_port() const {
  return impl_->command_acceptor.local_endpoint().port();
}

std::uint16_t SlaveServer::telemetry_port() const {
  return impl_->telemetry_acceptor.local_endpoint().port();
}

void SlaveServer::run(bool handle_signals) {
  if (handle_signals) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](boost::system::error_code, int) { stop(); });
  }
  impl_->accept_commands();
  impl_->accept_observers();
  impl_->next_tick = std::chrono::steady_clock::now();
  impl_->schedule_tick();
  impl_->ioc.run();
}

void SlaveServer::stop() { impl_->ioc.stop(); }

int SlaveServer::reject_count() const {
  std::lock_guard lock(impl_->state_mutex);
  return impl_->rejects;
}

TelemetryRecord SlaveServer::snapshot() const {
  std::lock_guard lock(impl_->state_mutex);
  return impl_->latest;
}

// ---------------------------------------------------------------------------
// Bridge

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  using MessageHandler = std::function<void(const std::shared_ptr<WsSession>&, std::string)>;

  WsSession(tcp::socket socket, MessageHandler on_message)
      : ws_(std::move(socket)), on_message_(std::move(on_message)) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) {
        self->alive_ = false;
        return;
      }
      self->open_ = true;
      self->flush();
      self->read();
    });
  }

  bool alive() const { return alive_; }

  void push(std::string text) {
    if (!alive_) return;
    if (outbox_.size() >= kMaxOutbox) {
      alive_ = false;
      beast::get_lowest_layer(ws_).close();
      return;
    }
    outbox_.push_back(std::move(text));
    if (open_ && outbox_.size() == 1) flush();
  }

 private:
  void read() {
    ws_.async_read(inbox_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->alive_ = false;
        return;
      }
      std::string text = beast::buffers_to_string(self->inbox_.data());
      self->inbox_.consume(self->inbox_.size());
      self->on_message_(self, std::move(text));
      self->read();
    });
  }

  void flush() {
    if (outbox_.empty() || writing_) return;
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (ec) {
                        self->alive_ = false;
                        return;
                      }
                      self->outbox_.pop_front();
                      self->flush();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer inbox_;
  std::deque<std::string> outbox_;
  MessageHandler on_message_;
  bool open_ = false;
  bool writing_ = false;
  bool alive_ = true;
};

std::string strip_newline(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

struct BridgeServer::Impl {
  explicit Impl(const Config& cfg)
      : config(cfg), telemetry_socket(ioc), acceptor(ioc), signals(ioc), master(cfg.arm) {
    command_link = tcp_connect(cfg.net.host, cfg.net.command_port);
    try {
      asio::connect(telemetry_socket,
                    tcp::resolver(ioc).resolve(cfg.net.host, std::to_string(cfg.net.telemetry_port)));
      open_acceptor(acceptor, resolve_endpoint(ioc, cfg.net.host, cfg.net.bridge_port));
    } catch (const boost::system::system_error& e) {
      throw to_std(e, "bridge: " + cfg.net.host);
    }
  }

  void broadcast(const std::string& text) {
    std::erase_if(sessions, [](const auto& s) { return !s->alive(); });
    for (auto& s : sessions) s->push(text);
  }

  void handle(const std::shared_ptr<WsSession>& from, const std::string& text) {
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(start, end - start);
      start = end + 1;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

      const auto input = parse_master_line(line);
      if (!input) {
        from->push("E," + std::string(to_string(input.error())));
        continue;
      }
      MasterTickResult result;
      try {
        result = master.tick(*input, *command_link);
      } catch (const TransportClosed&) {
        fail("slave command link closed");
        return;
      }
      if (result.error) {
        from->push("E," + result.message);
      } else if (result.frame) {
        broadcast(strip_newline(encode_frame(*result.frame)));
      }
    }
  }

  void accept() {
    acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto session = std::make_shared<WsSession>(
          std::move(socket),
          [this](const std::shared_ptr<WsSession>& s, std::string text) { handle(s, text); });
      sessions.push_back(session);
      session->start();
      accept();
    });
  }

  void read_telemetry() {
    asio::async_read_until(telemetry_socket, telemetry_buf, '\n',
                           [this](boost::system::error_code ec, std::size_t n) {
                             if (ec) {
                               fail("slave telemetry link closed");
                               return;
                             }
                             std::string line(
                                 asio::buffer_cast<const char*>(telemetry_buf.data()), n);
                             telemetry_buf.consume(n);
                             broadcast(strip_newline(std::move(line)));
                             read_telemetry();
                           });
  }

  void fail(std::string why) {
    if (!failure) failure = std::move(why);
    ioc.stop();
  }

  Config config;
  asio::io_context ioc;
  std::unique_ptr<Transport> command_link;
  tcp::socket telemetry_socket;
  asio::streambuf telemetry_buf;
  tcp::acceptor acceptor;
  asio::signal_set signals;
  MasterNode master;
  std::vector<std::shared_ptr<WsSession>> sessions;
  std::optional<std::string> failure;
};

BridgeServer::BridgeServer(const Config& config) : impl_(std::make_unique<Impl>(config)) {}

BridgeServer::~BridgeServer() = default;

std::uint16_t BridgeServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void BridgeServer::run(bool handle_signals) {
  if (handle_signals) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](boost::system::error_code, int) { stop(); });
  }
  impl_->accept();
  impl_->read_telemetry();
  impl_->ioc.run();
  if (impl_->failure) throw TransportClosed(*impl_->failure);
}

void BridgeServer::stop() { impl_->ioc.stop(); }

}  // namespace armtwin
