#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "armtwin/kinematics.hpp"

namespace armtwin {

namespace simd {

enum class Kernel { Scalar, Avx2 };

std::string_view to_string(Kernel k);

/// True when the kernel was compiled in and the running CPU can execute it.
bool kernel_supported(Kernel k);

/// Widest supported kernel, unless ARMTWIN_KERNEL=scalar is set in the
/// environment. Resolved once per process.
Kernel active_kernel();

}  // namespace simd

/// Structure-of-arrays joint poses for the batched kernels.
class JointBatch {
 public:
  JointBatch() = default;
  explicit JointBatch(std::span<const JointAngles> poses);

  void push_back(const JointAngles& q);
  void reserve(std::size_t n);
  std::size_t size() const { return theta_[0].size(); }

  JointAngles at(std::size_t i) const;
  std::span<const double> joint(std::size_t j) const { return theta_[j]; }

 private:
  std::array<std::vector<double>, kJointCount> theta_;
};

struct PositionBatch {
  std::vector<double> x, y, z;

  std::size_t size() const { return x.size(); }
  ToolPosition at(std::size_t i) const { return {x[i], y[i], z[i]}; }
};

/// Tool positions for every pose in the batch. Uses the closed-form pitch
/// sum rather than the matrix chain, so it doubles as a second route for
/// fk_position.
PositionBatch fk_position_batch(const JointBatch& poses, const LinkLengths& links);
PositionBatch fk_position_batch(const JointBatch& poses, const LinkLengths& links,
                                simd::Kernel kernel);

}  // namespace armtwin
