#include "armtwin/nodes.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace armtwin {

namespace {

// Snap when the remaining gap is within rounding of one step, so a 90 deg
// move at 3 deg per tick lands in exactly 30 ticks.
constexpr double kSnapSlack = 1e-9;

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ServoModel servo_step(const ServoModel& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("servo_step: dt must be positive");
  ServoModel next = model;
  const double limit = model.max_rate * dt;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const double gap = model.setpoint[j] - model.current[j];
    if (std::abs(gap) <= limit * (1.0 + kSnapSlack)) {
      next.current[j] = model.setpoint[j];
    } else {
      next.current[j] = model.current[j] + std::copysign(limit, gap);
    }
  }
  return next;
}

MasterNode::MasterNode(const ArmConfig& config) : config_(config) {
  detector_.delta_min = config.delta_min;
}

MasterTickResult MasterNode::tick(const MasterInput& input, Transport& link) {
  MasterTickResult result;

  const auto angles = normalize_input(input, config_.links, config_.limits);
  if (!angles) {
    result.error = angles.error();
    result.message = std::string(to_string(angles.error()));
    return result;
  }

  const ChangeDecision decision = change_filter(detector_, *angles);
  if (!decision.emit) {
    result.message = "unchanged";
    return result;
  }

  const Frame frame = Frame::from_angles(next_seq_, *angles);
  link.send(encode_frame(frame));

  detector_ = decision.detector;
  ++next_seq_;
  result.frame = frame;
  result.message = "sent seq=" + std::to_string(frame.seq);
  return result;
}

std::string encode_telemetry(const TelemetryRecord& r) {
  std::string line = "S," + std::to_string(r.seq);
  for (std::size_t j = 0; j < kJointCount; ++j) line += "," + format_fixed(r.angles[j], 6);
  line += "," + format_fixed(r.tool.x, 6);
  line += "," + format_fixed(r.tool.y, 6);
  line += "," + format_fixed(r.tool.z, 6);
  line += "," + r.verdict + "\n";
  return line;
}

std::optional<TelemetryRecord> decode_telemetry(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  const auto f = split_commas(line);
  if (f.size() != 11 || f[0] != "S" || f[10].empty()) return std::nullopt;

  TelemetryRecord r;
  const auto seq = to_double(f[1]);
  if (!seq) return std::nullopt;
  r.seq = static_cast<std::int32_t>(*seq);
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto v = to_double(f[2 + j]);
    if (!v) return std::nullopt;
    r.angles[j] = *v;
  }
  const auto x = to_double(f[7]);
  const auto y = to_double(f[8]);
  const auto z = to_double(f[9]);
  if (!x || !y || !z) return std::nullopt;
  r.tool = {*x, *y, *z};
  r.verdict = std::string(f[10]);
  return r;
}

SlaveNode::SlaveNode(const ArmConfig& config) : config_(config) {
  servo_.max_rate = config.max_rate;
}

TelemetryRecord SlaveNode::telemetry(double now) const {
  TelemetryRecord r;
  r.timestamp = now;
  r.seq = last_valid_seq_ ? static_cast<std::int32_t>(*last_valid_seq_) : -1;
  r.angles = servo_.current;
  r.tool = fk_position(servo_.current, config_.links);
  r.verdict = last_verdict_;
  return r;
}

TelemetryRecord SlaveNode::tick(std::string_view line, double now) {
  const auto frame = decode_frame(line);
  if (!frame) {
    ++reject_count_;
    last_verdict_ = std::string(to_string(frame.error()));
    return telemetry(now);
  }

  const JointAngles target = frame->angles();
  const auto report = validate_command(target, config_.links, config_.limits, config_.scene);
  if (!report.valid()) {
    ++reject_count_;
    last_verdict_ = report.summary();
    return telemetry(now);
  }

  servo_.setpoint = target;
  last_valid_seq_ = frame->seq;
  last_verdict_ = "accepted";
  return telemetry(now);
}

TelemetryRecord SlaveNode::step(double dt, double now) {
  servo_ = servo_step(servo_, dt);
  return telemetry(now);
}

LoopbackRun run_loopback(std::span<const MasterInput> scenario, const ArmConfig& config,
                         const LoopbackScenarioOptions& options) {
  auto [master_end, slave_end] = make_loopback_pair(options.link);
  MasterNode master(config);
  SlaveNode slave(config);

  LoopbackRun run;
  double now = 0.0;
  std::int64_t ticks = 0;

  const auto record = [&](TelemetryRecord r) {
    const auto check = validate_command(r.angles, config.links, config.limits, config.scene);
    if (!check.valid()) {
      run.safety_log.push_back("t=" + format_fixed(r.timestamp, 3) + " " + check.summary());
    }
    run.trace.push_back(std::move(r));
  };

  record(slave.telemetry(now));

  const auto max_steps = static_cast<std::int64_t>(std::ceil(options.settle_timeout / config.dt));
  for (const auto& input : scenario) {
    const auto result = master.tick(input, *master_end);
    run.operator_messages.push_back(result.message);
    if (result.frame) ++run.frames_sent;

    while (auto line = slave_end->receive(std::chrono::milliseconds(0))) {
      record(slave.tick(*line, now));
    }
    for (std::int64_t i = 0; i < max_steps && !slave.servo().settled(); ++i) {
      ++ticks;
      // Integer tick count keeps timestamps free of accumulated drift.
      now = static_cast<double>(ticks) * config.dt;
      record(slave.step(config.dt, now));
    }
  }

  run.reject_count = slave.reject_count();
  return run;
}

}  // namespace armtwin
