#include <boost/asio.hpp>

#include "armtwin/transport.hpp"

namespace armtwin {

namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

class TcpTransport final : public Transport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port) : socket_(ioc_) {
    tcp::resolver resolver(ioc_);
    asio::connect(socket_, resolver.resolve(host, std::to_string(port)));
    socket_.set_option(tcp::no_delay(true));
  }

  ~TcpTransport() override { close(); }

  void send(std::string_view line) override {
    if (!open_) throw TransportClosed("tcp link closed");
    std::string out(line);
    if (out.empty() || out.back() != '\n') out += '\n';
    boost::system::error_code ec;
    asio::write(socket_, asio::buffer(out), ec);
    if (ec) {
      open_ = false;
      throw TransportClosed("tcp send failed: " + ec.message());
    }
  }

  std::optional<std::string> receive(std::chrono::milliseconds timeout) override {
    if (auto line = take_line()) return line;
    if (!open_) throw TransportClosed("tcp link closed");

    boost::system::error_code result = asio::error::would_block;
    asio::async_read_until(socket_, buffer_, '\n',
                           [&](const boost::system::error_code& ec, std::size_t) { result = ec; });
    ioc_.restart();
    ioc_.run_for(timeout);
    if (result == asio::error::would_block) {
      socket_.cancel();
      ioc_.restart();
      ioc_.run();
    }

    if (auto line = take_line()) return line;
    if (result && result != asio::error::operation_aborted) {
      open_ = false;
      throw TransportClosed("tcp link closed: " + result.message());
    }
    return std::nullopt;
  }

  void close() override {
    if (!open_) return;
    open_ = false;
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  bool is_open() const override { return open_; }

 private:
  std::optional<std::string> take_line() {
    const auto data = buffer_.data();
    const std::string_view view(asio::buffer_cast<const char*>(data), buffer_.size());
    const auto nl = view.find('\n');
    if (nl == std::string_view::npos) return std::nullopt;
    std::string line(view.substr(0, nl));
    buffer_.consume(nl + 1);
    return line;
  }

  asio::io_context ioc_;
  tcp::socket socket_;
  asio::streambuf buffer_;
  bool open_ = true;
};

}  // namespace

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port) {
  try {
    return std::make_unique<TcpTransport>(host, port);
  } catch (const boost::system::system_error& e) {
    throw std::system_error(e.code(), "connect " + host + ":" + std::to_string(port));
  }
}

}  // namespace armtwin
