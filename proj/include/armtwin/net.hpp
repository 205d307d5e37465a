#pragma once

#include <cstdint>
#include <memory>

#include "armtwin/config.hpp"

namespace armtwin {

/// Slave node on TCP. Accepts master connections on the command port (frame
/// lines) and observers on the telemetry port (S-lines). Servo time advances
/// with the wall clock in ticks of config.arm.dt.
///
/// Port 0 in the config binds an ephemeral port; query the bound ports after
/// construction.
class SlaveServer {
 public:
  explicit SlaveServer(const Config& config);
  ~SlaveServer();

  SlaveServer(const SlaveServer&) = delete;
  SlaveServer& operator=(const SlaveServer&) = delete;

  std::uint16_t command_port() const;
  std::uint16_t telemetry_port() const;

  /// Blocks until stop() or, when enabled, SIGINT/SIGTERM.
  void run(bool handle_signals = false);
  void stop();

  /// Thread-safe copies of slave state for tests and diagnostics.
  int reject_count() const;
  TelemetryRecord snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// WebSocket front for browser clients. Text messages carrying `A`/`C`
/// lines run through a master node whose frames go to the slave; the frame
/// lines and the slave's telemetry are re-served to every client, and input
/// errors come back to the sender as `E,<error>`.
class BridgeServer {
 public:
  /// Connects to the slave's command and telemetry ports up front. Throws
  /// std::system_error if either is unavailable.
  explicit BridgeServer(const Config& config);
  ~BridgeServer();

  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  std::uint16_t port() const;

  /// Blocks until stop(). Throws TransportClosed if the slave goes away.
  void run(bool handle_signals = false);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace armtwin
