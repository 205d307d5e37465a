#include "armtwin/transform.hpp"

#include <algorithm>
#include <cmath>

namespace armtwin {

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

Transform4::Transform4()
    : m_{1.0, 0.0, 0.0, 0.0,  //
         0.0, 1.0, 0.0, 0.0,  //
         0.0, 0.0, 1.0, 0.0,  //
         0.0, 0.0, 0.0, 1.0} {}

Transform4::Transform4(const std::array<double, 16>& row_major) : m_(row_major) {}

Vec3 Transform4::apply(const Vec3& p) const {
  return {m_[0] * p.x + m_[1] * p.y + m_[2] * p.z + m_[3],
          m_[4] * p.x + m_[5] * p.y + m_[6] * p.z + m_[7],
          m_[8] * p.x + m_[9] * p.y + m_[10] * p.z + m_[11]};
}

Vec3 Transform4::apply_linear(const Vec3& v) const {
  return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z,
          m_[4] * v.x + m_[5] * v.y + m_[6] * v.z,
          m_[8] * v.x + m_[9] * v.y + m_[10] * v.z};
}

Transform4 rot_x(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Transform4({1.0, 0.0, 0.0, 0.0,  //
                     0.0, c, -s, 0.0,     //
                     0.0, s, c, 0.0,      //
                     0.0, 0.0, 0.0, 1.0});
}

Transform4 rot_y(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Transform4({c, 0.0, s, 0.0,    //
                     0.0, 1.0, 0.0, 0.0,  //
                     -s, 0.0, c, 0.0,   //
                     0.0, 0.0, 0.0, 1.0});
}

Transform4 rot_z(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Transform4({c, -s, 0.0, 0.0,   //
                     s, c, 0.0, 0.0,    //
                     0.0, 0.0, 1.0, 0.0,  //
                     0.0, 0.0, 0.0, 1.0});
}

Transform4 translate(double dx, double dy, double dz) {
  return Transform4({1.0, 0.0, 0.0, dx,  //
                     0.0, 1.0, 0.0, dy,  //
                     0.0, 0.0, 1.0, dz,  //
                     0.0, 0.0, 0.0, 1.0});
}

Transform4 compose(const Transform4& a, const Transform4& b) {
  Transform4 out;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  }
  out(3, 0) = 0.0;
  out(3, 1) = 0.0;
  out(3, 2) = 0.0;
  out(3, 3) = 1.0;
  return out;
}

double orthonormality_error(const Transform4& t) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 3; ++k) dot += t(k, i) * t(k, j);
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace armtwin
