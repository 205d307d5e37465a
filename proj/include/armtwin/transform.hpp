#pragma once

#include <array>
#include <cstddef>

namespace armtwin {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b);

/// 4x4 homogeneous transform, row-major. Every factory below leaves the
/// bottom row at exactly (0, 0, 0, 1); compose() preserves it.
class Transform4 {
 public:
  Transform4();  // identity
  explicit Transform4(const std::array<double, 16>& row_major);

  static Transform4 identity() { return Transform4{}; }

  double operator()(std::size_t row, std::size_t col) const { return m_[row * 4 + col]; }
  double& operator()(std::size_t row, std::size_t col) { return m_[row * 4 + col]; }

  const std::array<double, 16>& data() const { return m_; }

  Vec3 translation() const { return {m_[3], m_[7], m_[11]}; }
  Vec3 apply(const Vec3& p) const;        // rotate + translate a point
  Vec3 apply_linear(const Vec3& v) const; // rotate a direction only

  friend bool operator==(const Transform4&, const Transform4&) = default;

 private:
  std::array<double, 16> m_;
};

Transform4 rot_x(double theta);
Transform4 rot_y(double theta);
Transform4 rot_z(double theta);
Transform4 translate(double dx, double dy, double dz);

/// Standard matrix product a * b. The bottom row of the result is written
/// as (0, 0, 0, 1) directly rather than accumulated.
Transform4 compose(const Transform4& a, const Transform4& b);

inline Transform4 operator*(const Transform4& a, const Transform4& b) { return compose(a, b); }

/// Largest |R^T R - I| entry of the 3x3 rotation block.
double orthonormality_error(const Transform4& t);

}  // namespace armtwin
