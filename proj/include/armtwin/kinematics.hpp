#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string_view>

#include "armtwin/expected.hpp"
#include "armtwin/transform.hpp"

namespace armtwin {

constexpr double deg_to_rad(double degrees) { return degrees * (std::numbers::pi / 180.0); }
constexpr double rad_to_deg(double radians) { return radians * (180.0 / std::numbers::pi); }

inline constexpr std::size_t kJointCount = 5;

/// theta1 base yaw; theta2..theta4 pitch joints; theta5 gripper roll.
/// Radians throughout.
struct JointAngles {
  std::array<double, kJointCount> theta{};

  double& operator[](std::size_t i) { return theta[i]; }
  double operator[](std::size_t i) const { return theta[i]; }

  bool finite() const;
  static JointAngles from_degrees(double t1, double t2, double t3, double t4, double t5);

  friend bool operator==(const JointAngles&, const JointAngles&) = default;
};

/// Link offsets in millimetres. Defaults are the physical arm: 63 mm base,
/// 145 mm upper arm, 170 mm forearm, 110 mm from wrist to tool tip.
struct LinkLengths {
  double a1 = 63.0;
  double a2 = 145.0;
  double a3 = 170.0;
  double a4 = 110.0;

  bool valid() const { return a1 > 0.0 && a2 > 0.0 && a3 > 0.0 && a4 > 0.0; }
  double max_reach() const { return a2 + a3 + a4; }

  friend bool operator==(const LinkLengths&, const LinkLengths&) = default;
};

using ToolPosition = Vec3;

enum class IkError { NegativeReach, Unreachable, BaseSingular };

std::string_view to_string(IkError e);

struct IkIntermediates {
  double w = 0.0;      // horizontal wrist reach, mm
  double k = 0.0;      // shoulder-to-wrist distance, mm
  double alpha = 0.0;  // elevation of the shoulder-to-wrist line
  double beta = 0.0;   // interior elbow angle
  double gamma = 0.0;  // angle between upper arm and the shoulder-to-wrist line
};

struct IkSolution {
  JointAngles angles;
  IkIntermediates intermediates;
};

/// Link matrices in chain order: base->shoulder, shoulder->elbow,
/// elbow->wrist, wrist->tool.
std::array<Transform4, 4> link_transforms(const JointAngles& angles, const LinkLengths& links);

enum JointPoint : std::size_t { kBase = 0, kShoulder, kElbow, kWrist, kTool };

struct FkResult {
  Transform4 tool;                  // full chain product
  std::array<Vec3, 5> joint_points; // indexed by JointPoint
};

FkResult fk_full(const JointAngles& angles, const LinkLengths& links);
ToolPosition fk_position(const JointAngles& angles, const LinkLengths& links);

/// Geometric inverse kinematics with the last link held parallel to the
/// table. Only the elbow-up branch is produced; theta5 is passed through.
Expected<IkSolution, IkError> ik_solve(const ToolPosition& target, double theta5,
                                       const LinkLengths& links);

inline constexpr double kDefaultRoundtripTolerance = 1e-6;  // mm

struct RoundtripReport {
  enum class Status { Pass, Fail, Skipped };

  Status status = Status::Skipped;
  ToolPosition forward;                  // FK of the input angles
  std::optional<ToolPosition> recovered; // FK of the IK solution
  std::optional<JointAngles> solution;
  std::optional<IkError> skip_reason;
  double error = 0.0;                    // |forward - recovered|, mm
};

/// FK -> IK -> FK. Only the position has to survive the trip; the IK may
/// pick a different joint configuration than the one supplied.
RoundtripReport roundtrip_validate(const JointAngles& angles, const LinkLengths& links,
                                   double tolerance = kDefaultRoundtripTolerance);

}  // namespace armtwin
