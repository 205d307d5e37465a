#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace armtwin {

class TransportClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered line channel. send() takes one line (a trailing '\n' is
/// optional); receive() hands lines back without the terminator.
///
/// Real serial or Bluetooth links plug in here: anything that can move
/// newline-delimited text in order satisfies the contract.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Throws TransportClosed once the channel is closed.
  virtual void send(std::string_view line) = 0;

  /// Next line, or nullopt when none arrived within the timeout. Throws
  /// TransportClosed when the channel is closed and fully drained.
  virtual std::optional<std::string> receive(std::chrono::milliseconds timeout) = 0;

  virtual void close() = 0;
  virtual bool is_open() const = 0;
};

struct LoopbackOptions {
  double drop_probability = 0.0;  // per line, in [0, 1]
  std::uint64_t seed = 0;
};

/// Two connected in-process endpoints. Lines sent on one are received on
/// the other; closing either side closes both. Thread-safe.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair(
    const LoopbackOptions& options = {});

/// TCP client endpoint. Throws std::system_error when the connection cannot
/// be established.
std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port);

}  // namespace armtwin
