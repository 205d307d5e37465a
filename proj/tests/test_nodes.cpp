#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "armtwin/nodes.hpp"

namespace armtwin {
namespace {

const ArmConfig kConfig{};

AngleLine angles_deg(double t1, double t2, double t3, double t4, double t5) {
  return AngleLine{{t1, t2, t3, t4, t5}};
}

std::string frame_line(std::uint16_t seq, double t1, double t2, double t3, double t4, double t5) {
  return encode_frame(Frame::from_angles(seq, JointAngles::from_degrees(t1, t2, t3, t4, t5)));
}

void expect_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

TEST(Servo, AtSetpointStaysPut) {
  ServoModel m;
  m.current = m.setpoint = JointAngles::from_degrees(10, 20, 30, 40, 50);
  EXPECT_EQ(servo_step(m, 0.01).current, m.current);
}

TEST(Servo, RateLawOverOneStep) {
  ServoModel m;
  m.setpoint = JointAngles::from_degrees(90, -90, 0, 0, 0);
  const auto next = servo_step(m, 0.1);
  EXPECT_NEAR(rad_to_deg(next.current[0]), 30.0, 1e-12);
  EXPECT_NEAR(rad_to_deg(next.current[1]), -30.0, 1e-12);
  EXPECT_EQ(next.current[2], 0.0);
}

TEST(Servo, NinetyDegreeStepSettlesInThirtyTicks) {
  ServoModel m;
  m.setpoint = JointAngles::from_degrees(90, 0, 0, 0, 0);
  const double dt = 0.01;
  int ticks = 0;
  while (!m.settled() && ticks < 1000) {
    m = servo_step(m, dt);
    ++ticks;
  }
  EXPECT_NEAR(ticks * dt, 0.30, dt);
  EXPECT_EQ(ticks, 30);
}

TEST(Servo, GapNeverGrows) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> step(1e-4, 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    ServoModel m;
    m.current = JointAngles{{u(rng), u(rng), u(rng), u(rng), u(rng)}};
    m.setpoint = JointAngles{{u(rng), u(rng), u(rng), u(rng), u(rng)}};
    for (int i = 0; i < 200; ++i) {
      const double dt = step(rng);
      const auto next = servo_step(m, dt);
      for (std::size_t j = 0; j < kJointCount; ++j) {
        const double before = std::abs(m.setpoint[j] - m.current[j]);
        const double after = std::abs(next.setpoint[j] - next.current[j]);
        EXPECT_LE(after, before);
        EXPECT_LE(std::abs(next.current[j] - m.current[j]), m.max_rate * dt * (1 + 1e-9));
      }
      m = next;
    }
  }
}

TEST(Servo, RejectsNonPositiveDt) {
  EXPECT_THROW(servo_step(ServoModel{}, 0.0), std::invalid_argument);
  EXPECT_THROW(servo_step(ServoModel{}, -1.0), std::invalid_argument);
}

class MasterTest : public ::testing::Test {
 protected:
  std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> link = make_loopback_pair();
  MasterNode master{kConfig};

  std::vector<std::string> drain() {
    std::vector<std::string> out;
    while (auto l = link.second->receive(std::chrono::milliseconds(0))) out.push_back(*l);
    return out;
  }
};

TEST_F(MasterTest, FirstAngleLineSendsAFrame) {
  const auto r = master.tick(angles_deg(0, 0, 0, 0, 0), *link.first);
  ASSERT_TRUE(r.frame);
  EXPECT_EQ(r.message, "sent seq=0");
  const auto lines = drain();
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(decode_frame(lines[0]).value(), *r.frame);
}

TEST_F(MasterTest, RepeatIsDebounced) {
  master.tick(angles_deg(10, 0, 0, 0, 0), *link.first);
  const auto r = master.tick(angles_deg(10, 0, 0, 0, 0), *link.first);
  EXPECT_FALSE(r.frame);
  EXPECT_EQ(r.message, "unchanged");
  EXPECT_EQ(drain().size(), 1u);
  EXPECT_EQ(master.next_seq(), 1);
}

TEST_F(MasterTest, ThousandIdenticalMessagesOneFrame) {
  int frames = 0;
  for (int i = 0; i < 1000; ++i) frames += master.tick(CoordLine{{250, 0, 150}, 0}, *link.first).frame ? 1 : 0;
  EXPECT_EQ(frames, 1);
  EXPECT_EQ(drain().size(), 1u);
}

TEST_F(MasterTest, UnreachableSendsNothing) {
  const auto r = master.tick(CoordLine{{500, 0, 208}, 0}, *link.first);
  EXPECT_FALSE(r.frame);
  ASSERT_TRUE(r.error);
  EXPECT_EQ(*r.error, InputError::Unreachable);
  EXPECT_EQ(r.message, "Unreachable");
  EXPECT_TRUE(drain().empty());
  EXPECT_EQ(master.next_seq(), 0);
}

TEST_F(MasterTest, ClosedLinkLeavesStateUntouched) {
  link.first->close();
  EXPECT_THROW(master.tick(angles_deg(1, 2, 3, 4, 5), *link.first), TransportClosed);
  EXPECT_EQ(master.next_seq(), 0);
  EXPECT_FALSE(master.detector().last_sent);
}

TEST_F(MasterTest, SeqWrapsAfter65535) {
  for (int i = 0; i < 65536; ++i) {
    // Alternate between two poses a full degree apart so each tick sends.
    master.tick(angles_deg(i % 2 ? 1.0 : 0.0, 0, 0, 0, 0), *link.first);
    if (i % 4096 == 0) drain();
  }
  EXPECT_EQ(master.next_seq(), 0);
  const auto r = master.tick(angles_deg(5, 0, 0, 0, 0), *link.first);
  ASSERT_TRUE(r.frame);
  EXPECT_EQ(r.frame->seq, 0);
}

TEST(Slave, AcceptsRestFrame) {
  SlaveNode slave(kConfig);
  const auto t = slave.tick(frame_line(0, 0, 0, 0, 0, 0), 0.0);
  EXPECT_EQ(t.verdict, "accepted");
  EXPECT_EQ(t.seq, 0);
  EXPECT_EQ(slave.servo().setpoint, JointAngles{});
  EXPECT_EQ(slave.reject_count(), 0);
}

TEST(Slave, RejectsOutOfLimitShoulder) {
  SlaveNode slave(kConfig);
  slave.tick(frame_line(0, 10, 0, 0, 0, 0), 0.0);
  const auto before = slave.servo().setpoint;
  const auto t = slave.tick(frame_line(1, 0, 120, 0, 0, 0), 0.0);
  EXPECT_EQ(slave.servo().setpoint, before);
  EXPECT_EQ(slave.reject_count(), 1);
  EXPECT_EQ(t.seq, 0);
  EXPECT_NE(t.verdict.find("LimitExceeded"), std::string::npos);
}

TEST(Slave, CorruptLineIsCrcMismatch) {
  SlaveNode slave(kConfig);
  std::string line = frame_line(0, 10, 20, 30, 40, 50);
  line[5] = line[5] == '1' ? '2' : '1';
  const auto t = slave.tick(line, 0.0);
  EXPECT_EQ(t.verdict, "CrcMismatch");
  EXPECT_EQ(t.seq, -1);
  EXPECT_EQ(slave.reject_count(), 1);
  EXPECT_EQ(slave.servo().setpoint, JointAngles{});
}

TEST(Slave, GarbageIsMalformed) {
  SlaveNode slave(kConfig);
  EXPECT_EQ(slave.tick("hello", 0.0).verdict, "MalformedFrame");
  EXPECT_EQ(slave.tick("", 0.0).verdict, "MalformedFrame");
  EXPECT_EQ(slave.reject_count(), 2);
}

TEST(Slave, TelemetryToolMatchesFk) {
  SlaveNode slave(kConfig);
  slave.tick(frame_line(0, 30, 20, 10, -30, 0), 0.0);
  for (int i = 0; i < 50; ++i) {
    const auto t = slave.step(kConfig.dt, i * kConfig.dt);
    expect_near(t.tool, fk_position(t.angles, kConfig.links), 1e-9);
  }
}

// Property: reject_count tracks an independent decode + validate pass.
TEST(Slave, RejectionConservation) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-130, 130);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> byte(32, 126);
  SlaveNode slave(kConfig);
  int expected = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string line = frame_line(static_cast<std::uint16_t>(i), u(rng), u(rng), u(rng), u(rng),
                                  std::abs(u(rng)) * 0.6);
    switch (kind(rng)) {
      case 0: {
        auto& c = line[std::uniform_int_distribution<std::size_t>(0, line.size() - 2)(rng)];
        const char old = c;
        while (c == old) c = static_cast<char>(byte(rng));
        break;
      }
      case 1:
        line = "garbage " + std::to_string(i);
        break;
      default:
        break;
    }
    const auto f = decode_frame(line);
    if (!f || !validate_command(f->angles(), kConfig.links, kConfig.limits, kConfig.scene).valid()) {
      ++expected;
    }
    slave.tick(line, 0.0);
    ASSERT_EQ(slave.reject_count(), expected);
  }
  EXPECT_GT(expected, 0);
}

TEST(Telemetry, EncodeDecode) {
  TelemetryRecord r;
  r.seq = 42;
  r.angles = JointAngles{{0.1, -0.2, 0.3, -0.4, 0.5}};
  r.tool = {250.0, -0.5, 150.25};
  r.verdict = "LimitExceeded+FloorCollision";
  const std::string line = encode_telemetry(r);
  EXPECT_EQ(line,
            "S,42,0.100000,-0.200000,0.300000,-0.400000,0.500000,250.000000,-0.500000,"
            "150.250000,LimitExceeded+FloorCollision\n");
  const auto back = decode_telemetry(line);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->seq, 42);
  EXPECT_EQ(back->angles, r.angles);
  EXPECT_EQ(back->tool, r.tool);
  EXPECT_EQ(back->verdict, r.verdict);
}

TEST(Telemetry, InitialRecord) {
  EXPECT_EQ(encode_telemetry(SlaveNode(kConfig).telemetry(0.0)),
            "S,-1,0.000000,0.000000,0.000000,0.000000,0.000000,280.000000,0.000000,208.000000,idle\n");
  EXPECT_FALSE(decode_telemetry("J,0,0,0,0,0,0,00"));
  EXPECT_FALSE(decode_telemetry("S,1,2,3"));
}

TEST(Loopback, EmptyScenario) {
  const auto run = run_loopback({}, kConfig);
  ASSERT_EQ(run.trace.size(), 1u);
  EXPECT_EQ(run.trace[0].verdict, "idle");
  EXPECT_TRUE(run.operator_messages.empty());
}

TEST(Loopback, RestPose) {
  const std::vector<MasterInput> s{angles_deg(0, 0, 0, 0, 0)};
  const auto run = run_loopback(s, kConfig);
  expect_near(run.trace.back().tool, {280, 0, 208}, 1e-9);
  EXPECT_EQ(run.frames_sent, 1);
}

TEST(Loopback, CoordinateTargetSettles) {
  const std::vector<MasterInput> s{CoordLine{{250, 0, 150}, 0}};
  const auto run = run_loopback(s, kConfig);
  expect_near(run.trace.back().tool, {250, 0, 150}, 0.01);
  EXPECT_EQ(run.trace.back().verdict, "accepted");
  EXPECT_TRUE(run.safety_log.empty());
}

TEST(Loopback, ShoulderOverTravelIsRejected) {
  const std::vector<MasterInput> s{angles_deg(20, 10, 0, 0, 0), angles_deg(20, 120, 0, 0, 0)};
  const auto run = run_loopback(s, kConfig);
  EXPECT_EQ(run.reject_count, 1);
  EXPECT_EQ(run.frames_sent, 2);
  EXPECT_EQ(run.trace.back().angles,
            Frame::from_angles(0, JointAngles::from_degrees(20, 10, 0, 0, 0)).angles());
  EXPECT_EQ(run.trace.back().seq, 0);
}

TEST(Loopback, UnreachableTargetLeavesArmAlone) {
  const std::vector<MasterInput> s{CoordLine{{500, 0, 208}, 0}};
  const auto run = run_loopback(s, kConfig);
  EXPECT_EQ(run.frames_sent, 0);
  EXPECT_EQ(run.operator_messages, std::vector<std::string>{"Unreachable"});
  EXPECT_EQ(run.trace.size(), 1u);
}

TEST(Loopback, TimestampsAdvanceByDt) {
  const std::vector<MasterInput> s{angles_deg(90, 0, 0, 0, 0)};
  const auto run = run_loopback(s, kConfig);
  // Initial record, the tick record, then 30 servo steps.
  ASSERT_EQ(run.trace.size(), 32u);
  EXPECT_NEAR(run.trace.back().timestamp, 0.30, 1e-12);
}

std::vector<MasterInput> random_scenario(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-100, 100);
  std::uniform_real_distribution<double> c(-300, 300);
  std::vector<MasterInput> s;
  for (int i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      s.push_back(CoordLine{{c(rng), c(rng), std::abs(c(rng))}, 10});
    } else {
      s.push_back(angles_deg(u(rng), u(rng), u(rng), u(rng), std::abs(u(rng)) * 0.8));
    }
  }
  return s;
}

TEST(Loopback, Deterministic) {
  const auto s = random_scenario(3, 40);
  LoopbackScenarioOptions opt;
  opt.link = {0.3, 99};
  const auto a = run_loopback(s, kConfig, opt);
  const auto b = run_loopback(s, kConfig, opt);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(encode_telemetry(a.trace[i]), encode_telemetry(b.trace[i]));
    EXPECT_EQ(a.trace[i].timestamp, b.trace[i].timestamp);
  }
  EXPECT_EQ(a.operator_messages, b.operator_messages);
  EXPECT_EQ(a.safety_log, b.safety_log);
}

TEST(Loopback, LossySeedMatters) {
  const auto s = random_scenario(4, 60);
  LoopbackScenarioOptions a, b;
  a.link = {0.5, 1};
  b.link = {0.5, 2};
  EXPECT_NE(run_loopback(s, kConfig, a).trace.size(), run_loopback(s, kConfig, b).trace.size());
}

TEST(Loopback, LivenessAndPointwiseSafety) {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto s = random_scenario(seed, 30);
    const auto run = run_loopback(s, kConfig);
    const double bound = deg_to_rad(180.0) / kConfig.max_rate + kConfig.dt;
    double last_accept = -1.0;
    for (const auto& r : run.trace) {
      if (r.verdict == "accepted") last_accept = r.timestamp;
    }
    // Every accepted setpoint is reached inside the liveness bound.
    EXPECT_LE(run.trace.back().timestamp - std::max(last_accept, 0.0), bound + 1e-9);
    // Endpoints of every move passed the gate; intermediate points are only
    // logged when they fail it.
    for (const auto& line : run.safety_log) EXPECT_EQ(line.rfind("t=", 0), 0u);
  }
}

TEST(Loopback, EveryFrameIsAcceptedOrRejected) {
  const auto s = random_scenario(5, 60);
  const auto run = run_loopback(s, kConfig);
  std::vector<std::int32_t> accepted_seqs;
  for (const auto& r : run.trace) {
    if (r.verdict == "accepted" &&
        (accepted_seqs.empty() || accepted_seqs.back() != r.seq)) {
      accepted_seqs.push_back(r.seq);
    }
  }
  EXPECT_GT(run.reject_count, 0);
  EXPECT_EQ(run.reject_count + static_cast<int>(accepted_seqs.size()), run.frames_sent);
}

}  // namespace
}  // namespace armtwin
