#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "armtwin/expected.hpp"
#include "armtwin/kinematics.hpp"
#include "armtwin/protocol.hpp"
#include "armtwin/transport.hpp"
#include "armtwin/workspace.hpp"

namespace armtwin {

/// Everything the two nodes need to agree on.
struct ArmConfig {
  LinkLengths links;
  JointLimits limits;
  Scene scene = Scene::for_links(LinkLengths{});
  double delta_min = deg_to_rad(0.5);    // change-filter threshold
  double max_rate = deg_to_rad(300.0);   // servo slew, rad/s
  double dt = 0.01;                      // simulation tick, s
};

/// Kinematic servo bank: each joint slews toward its setpoint at max_rate.
struct ServoModel {
  JointAngles current;
  JointAngles setpoint;
  double max_rate = deg_to_rad(300.0);

  bool settled() const { return current == setpoint; }
};

/// Advances every joint by at most max_rate * dt. Throws
/// std::invalid_argument when dt <= 0.
ServoModel servo_step(const ServoModel& model, double dt);

struct MasterTickResult {
  std::optional<Frame> frame;        // set when a line went out
  std::optional<InputError> error;   // normalization failure, nothing sent
  std::string message;               // operator-facing text
};

/// Master side: normalize -> change filter -> encode -> send.
class MasterNode {
 public:
  explicit MasterNode(const ArmConfig& config);

  /// Throws TransportClosed if the link is down; state is untouched then.
  MasterTickResult tick(const MasterInput& input, Transport& link);

  std::uint16_t next_seq() const { return next_seq_; }
  const ChangeDetector& detector() const { return detector_; }

 private:
  ArmConfig config_;
  ChangeDetector detector_;
  std::uint16_t next_seq_ = 0;
};

/// Slave-side state snapshot. Telemetry is an observer stream; nothing on
/// it flows back into the master.
struct TelemetryRecord {
  double timestamp = 0.0;          // simulated seconds
  std::int32_t seq = -1;           // last accepted frame, -1 before any
  JointAngles angles;              // current servo angles
  ToolPosition tool;               // fk_position(angles)
  std::string verdict = "idle";    // outcome of the most recent command line
};

/// `S,<seq>,<t1>..<t5>,<x>,<y>,<z>,<verdict>\n`; radians and millimetres,
/// six decimals each.
std::string encode_telemetry(const TelemetryRecord& record);
std::optional<TelemetryRecord> decode_telemetry(std::string_view line);

class SlaveNode {
 public:
  explicit SlaveNode(const ArmConfig& config);

  /// Decode, validate and (if valid) retarget the servos. Never throws on
  /// bad input; failures bump reject_count and show up in the verdict.
  TelemetryRecord tick(std::string_view line, double now);

  /// One servo integration step.
  TelemetryRecord step(double dt, double now);

  TelemetryRecord telemetry(double now) const;

  const ServoModel& servo() const { return servo_; }
  int reject_count() const { return reject_count_; }
  std::optional<std::uint16_t> last_valid_seq() const { return last_valid_seq_; }
  const ArmConfig& config() const { return config_; }

 private:
  ArmConfig config_;
  ServoModel servo_;
  std::optional<std::uint16_t> last_valid_seq_;
  int reject_count_ = 0;
  std::string last_verdict_ = "idle";
};

struct LoopbackRun {
  std::vector<TelemetryRecord> trace;          // initial record first
  std::vector<std::string> operator_messages;  // one per scenario entry
  std::vector<std::string> safety_log;         // telemetry instants that failed validation
  int reject_count = 0;
  int frames_sent = 0;
};

struct LoopbackScenarioOptions {
  double settle_timeout = 5.0;   // s of simulated time per scenario entry
  LoopbackOptions link;          // optional line loss
};

/// Deterministic replay: master tick -> loopback link -> slave tick -> servo
/// steps until settled. Time is simulated in steps of config.dt.
LoopbackRun run_loopback(std::span<const MasterInput> scenario, const ArmConfig& config,
                         const LoopbackScenarioOptions& options = {});

}  // namespace armtwin
