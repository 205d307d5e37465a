#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "armtwin/kinematics.hpp"

namespace armtwin {

struct JointRange {
  double min = 0.0;  // radians
  double max = 0.0;

  bool contains(double v) const { return v >= min && v <= max; }
  friend bool operator==(const JointRange&, const JointRange&) = default;
};

/// Per-joint servo ranges. Defaults: +-90 deg for joints 1-4, [0, 90] deg
/// for the gripper.
struct JointLimits {
  std::array<JointRange, kJointCount> joint{{
      {deg_to_rad(-90.0), deg_to_rad(90.0)},
      {deg_to_rad(-90.0), deg_to_rad(90.0)},
      {deg_to_rad(-90.0), deg_to_rad(90.0)},
      {deg_to_rad(-90.0), deg_to_rad(90.0)},
      {deg_to_rad(0.0), deg_to_rad(90.0)},
  }};

  bool valid() const;
  friend bool operator==(const JointLimits&, const JointLimits&) = default;
};

/// Bench plane plus a keep-out cylinder around the base axis.
struct Scene {
  double floor_z = 0.0;
  double base_radius = 40.0;
  double base_height = 63.0;

  bool valid() const { return base_radius > 0.0 && base_height > 0.0; }
  static Scene for_links(const LinkLengths& links) { return Scene{0.0, 40.0, links.a1}; }
  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class ViolationKind {
  LimitExceeded,
  FloorCollision,
  BaseCollision,
  Unreachable,
  NegativeReach,
  BaseSingular,
};

std::string_view to_string(ViolationKind kind);
ViolationKind violation_from(IkError e);

struct Violation {
  ViolationKind kind;
  int joint = 0;  // 1-based joint for LimitExceeded, link index for collisions
  Vec3 point{};   // first offending sample for collisions
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  void merge(const ValidityReport& other);
  /// "+"-joined kind names, one per distinct kind, or "accepted".
  std::string summary() const;
};

inline constexpr int kSamplesPerLink = 10;

ValidityReport check_limits(const JointAngles& angles, const JointLimits& limits);
ValidityReport check_collision(const JointAngles& angles, const LinkLengths& links,
                               const Scene& scene);

/// Gate applied by the slave before any setpoint change.
ValidityReport validate_command(const JointAngles& angles, const LinkLengths& links,
                                const JointLimits& limits, const Scene& scene);

struct WorkspaceSample {
  JointAngles angles;
  ToolPosition position;
  bool valid = false;
};

/// Scrambled Halton sequence over the joint box (bases 2, 3, 5, 7, 11),
/// shifted by a seed-derived Cranley-Patterson rotation.
std::vector<WorkspaceSample> sample_workspace(const LinkLengths& links,
                                              const JointLimits& limits, const Scene& scene,
                                              std::size_t n, std::uint64_t seed = 0);

}  // namespace armtwin
