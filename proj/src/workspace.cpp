#include "armtwin/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "armtwin/batch.hpp"

namespace armtwin {

bool JointLimits::valid() const {
  return std::all_of(joint.begin(), joint.end(), [](const JointRange& r) {
    return std::isfinite(r.min) && std::isfinite(r.max) && r.min < r.max;
  });
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::LimitExceeded:
      return "LimitExceeded";
    case ViolationKind::FloorCollision:
      return "FloorCollision";
    case ViolationKind::BaseCollision:
      return "BaseCollision";
    case ViolationKind::Unreachable:
      return "Unreachable";
    case ViolationKind::NegativeReach:
      return "NegativeReach";
    case ViolationKind::BaseSingular:
      return "BaseSingular";
  }
  return "?";
}

ViolationKind violation_from(IkError e) {
  switch (e) {
    case IkError::NegativeReach:
      return ViolationKind::NegativeReach;
    case IkError::Unreachable:
      return ViolationKind::Unreachable;
    case IkError::BaseSingular:
      return ViolationKind::BaseSingular;
  }
  return ViolationKind::Unreachable;
}

bool ValidityReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

void ValidityReport::merge(const ValidityReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::string ValidityReport::summary() const {
  if (valid()) return "accepted";
  std::vector<ViolationKind> seen;
  std::string out;
  for (const auto& v : violations) {
    if (std::find(seen.begin(), seen.end(), v.kind) != seen.end()) continue;
    seen.push_back(v.kind);
    if (!out.empty()) out += '+';
    out += to_string(v.kind);
  }
  return out;
}

ValidityReport check_limits(const JointAngles& angles, const JointLimits& limits) {
  ValidityReport report;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    if (!limits.joint[j].contains(angles[j])) {
      report.violations.push_back({ViolationKind::LimitExceeded, static_cast<int>(j) + 1, {}});
    }
  }
  return report;
}

ValidityReport check_collision(const JointAngles& angles, const LinkLengths& links,
                               const Scene& scene) {
  const auto fk = fk_full(angles, links);
  const auto& pts = fk.joint_points;

  ValidityReport report;
  bool floor_hit = false;
  bool base_hit = false;

  // Link i runs from joint point i-1 to joint point i. Link 1 is the base
  // column itself, so it is only tested against the floor.
  for (int link = 1; link <= 4; ++link) {
    const Vec3& from = pts[static_cast<std::size_t>(link - 1)];
    const Vec3& to = pts[static_cast<std::size_t>(link)];
    for (int s = 0; s <= kSamplesPerLink; ++s) {
      const double t = static_cast<double>(s) / kSamplesPerLink;
      const Vec3 p{from.x + t * (to.x - from.x), from.y + t * (to.y - from.y),
                   from.z + t * (to.z - from.z)};

      if (!floor_hit && p.z < scene.floor_z) {
        floor_hit = true;
        report.violations.push_back({ViolationKind::FloorCollision, link, p});
      }
      if (!base_hit && link >= 2 && std::hypot(p.x, p.y) < scene.base_radius &&
          p.z < scene.base_height) {
        base_hit = true;
        report.violations.push_back({ViolationKind::BaseCollision, link, p});
      }
    }
  }
  return report;
}

ValidityReport validate_command(const JointAngles& angles, const LinkLengths& links,
                                const JointLimits& limits, const Scene& scene) {
  ValidityReport report = check_limits(angles, limits);
  report.merge(check_collision(angles, links, scene));
  return report;
}

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double scale = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= static_cast<double>(base);
  }
  return result;
}

}  // namespace

std::vector<WorkspaceSample> sample_workspace(const LinkLengths& links,
                                              const JointLimits& limits, const Scene& scene,
                                              std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_workspace: n must be positive");

  constexpr std::array<std::uint64_t, kJointCount> kBases{2, 3, 5, 7, 11};
  std::array<double, kJointCount> shift{};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& s : shift) s = unit(rng);

  JointBatch poses;
  poses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    JointAngles q;
    for (std::size_t j = 0; j < kJointCount; ++j) {
      double u = radical_inverse(i + 1, kBases[j]) + shift[j];
      u -= std::floor(u);
      const auto& r = limits.joint[j];
      q[j] = r.min + u * (r.max - r.min);
    }
    poses.push_back(q);
  }

  const PositionBatch positions = fk_position_batch(poses, links);

  std::vector<WorkspaceSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const JointAngles q = poses.at(i);
    out.push_back({q, positions.at(i), validate_command(q, links, limits, scene).valid()});
  }
  return out;
}

}  // namespace armtwin
