#include "armtwin/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace armtwin {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// acos arguments this far outside [-1, 1] are treated as rounding noise.
constexpr double kAcosSlack = 1e-9;

std::optional<double> guarded_acos(double arg) {
  if (!std::isfinite(arg) || arg > 1.0 + kAcosSlack || arg < -1.0 - kAcosSlack) {
    return std::nullopt;
  }
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

}  // namespace

bool JointAngles::finite() const {
  return std::all_of(theta.begin(), theta.end(), [](double t) { return std::isfinite(t); });
}

JointAngles JointAngles::from_degrees(double t1, double t2, double t3, double t4, double t5) {
  return JointAngles{{deg_to_rad(t1), deg_to_rad(t2), deg_to_rad(t3), deg_to_rad(t4),
                      deg_to_rad(t5)}};
}

std::string_view to_string(IkError e) {
  switch (e) {
    case IkError::NegativeReach:
      return "NegativeReach";
    case IkError::Unreachable:
      return "Unreachable";
    case IkError::BaseSingular:
      return "BaseSingular";
  }
  return "?";
}

std::array<Transform4, 4> link_transforms(const JointAngles& q, const LinkLengths& links) {
  // Base yaw carries a1 in its translation column before the shoulder pitch.
  Transform4 base = rot_z(q[0]);
  base(2, 3) = links.a1;

  return {
      base * rot_y(q[1]),
      // The +90 deg offset puts the forearm horizontal at rest.
      translate(0.0, 0.0, links.a2) * rot_y(kHalfPi + q[2]),
      translate(0.0, 0.0, links.a3) * rot_y(q[3]),
      translate(0.0, 0.0, links.a4) * rot_z(q[4]),
  };
}

FkResult fk_full(const JointAngles& angles, const LinkLengths& links) {
  const auto m = link_transforms(angles, links);

  FkResult out;
  out.joint_points[kBase] = Vec3{0.0, 0.0, 0.0};

  Transform4 acc = m[0];
  out.joint_points[kShoulder] = acc.translation();
  acc = acc * m[1];
  out.joint_points[kElbow] = acc.translation();
  acc = acc * m[2];
  out.joint_points[kWrist] = acc.translation();
  acc = acc * m[3];
  out.joint_points[kTool] = acc.translation();
  out.tool = acc;
  return out;
}

ToolPosition fk_position(const JointAngles& angles, const LinkLengths& links) {
  return fk_full(angles, links).tool.translation();
}

Expected<IkSolution, IkError> ik_solve(const ToolPosition& target, double theta5,
                                       const LinkLengths& links) {
  const double x = target.x;
  const double y = target.y;
  const double z = target.z;

  if (x == 0.0 && y == 0.0) return IkError::BaseSingular;

  IkIntermediates mid;
  mid.w = std::hypot(x, y) - links.a4;
  if (mid.w < 0.0) return IkError::NegativeReach;

  const double rise = z - links.a1;
  mid.k = std::hypot(mid.w, rise);
  if (mid.k == 0.0) return IkError::Unreachable;

  const double a2 = links.a2;
  const double a3 = links.a3;
  const double k = mid.k;

  const auto gamma = guarded_acos((a2 * a2 + k * k - a3 * a3) / (2.0 * a2 * k));
  const auto beta = guarded_acos((a2 * a2 + a3 * a3 - k * k) / (2.0 * a2 * a3));
  if (!gamma || !beta) return IkError::Unreachable;

  // atan2 agrees with atan(rise / w) for w > 0 and stays defined at w == 0.
  mid.alpha = std::atan2(rise, mid.w);
  mid.gamma = *gamma;
  mid.beta = *beta;

  IkSolution sol;
  sol.intermediates = mid;
  auto& q = sol.angles;
  q[0] = std::atan2(y, x);
  q[1] = kHalfPi - mid.alpha - mid.gamma;
  q[2] = kHalfPi - mid.beta;
  q[3] = -q[1] - q[2];  // undo the upper-arm pitch so the last link stays level
  q[4] = theta5;
  return sol;
}

RoundtripReport roundtrip_validate(const JointAngles& angles, const LinkLengths& links,
                                   double tolerance) {
  RoundtripReport report;
  report.forward = fk_position(angles, links);

  const auto ik = ik_solve(report.forward, angles[4], links);
  if (!ik) {
    report.status = RoundtripReport::Status::Skipped;
    report.skip_reason = ik.error();
    return report;
  }

  report.solution = ik->angles;
  report.recovered = fk_position(ik->angles, links);
  report.error = distance(report.forward, *report.recovered);
  report.status = report.error < tolerance ? RoundtripReport::Status::Pass
                                           : RoundtripReport::Status::Fail;
  return report;
}

}  // namespace armtwin
