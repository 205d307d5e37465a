#include <cmath>

#include "simd/kernels.hpp"

namespace armtwin::simd::detail {

// Reference kernel. The forearm pitch is theta2 + 90deg + theta3, so its
// sine and cosine are cos(theta2 + theta3) and -sin(theta2 + theta3).
void fk_batch_scalar(const FkBatchArgs& a) {
  for (std::size_t i = 0; i < a.n; ++i) {
    const double elbow = a.theta2[i] + a.theta3[i];
    const double wrist = elbow + a.theta4[i];

    const double radial = a.a2 * std::sin(a.theta2[i]) + a.a3 * std::cos(elbow) +
                          a.a4 * std::cos(wrist);
    a.z[i] = a.a1 + a.a2 * std::cos(a.theta2[i]) - a.a3 * std::sin(elbow) -
             a.a4 * std::sin(wrist);
    a.x[i] = std::cos(a.theta1[i]) * radial;
    a.y[i] = std::sin(a.theta1[i]) * radial;
  }
}

}  // namespace armtwin::simd::detail
