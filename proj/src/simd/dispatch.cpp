#include <cstdlib>
#include <stdexcept>
#include <string>

#include "armtwin/batch.hpp"
#include "simd/kernels.hpp"

namespace armtwin {

namespace simd {

std::string_view to_string(Kernel k) {
  switch (k) {
    case Kernel::Scalar:
      return "scalar";
    case Kernel::Avx2:
      return "avx2";
  }
  return "?";
}

bool kernel_supported(Kernel k) {
  switch (k) {
    case Kernel::Scalar:
      return true;
    case Kernel::Avx2:
#if defined(ARMTWIN_HAVE_AVX2_KERNELS)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Kernel active_kernel() {
  static const Kernel chosen = [] {
    const char* forced = std::getenv("ARMTWIN_KERNEL");
    if (forced != nullptr && std::string(forced) == "scalar") return Kernel::Scalar;
    return kernel_supported(Kernel::Avx2) ? Kernel::Avx2 : Kernel::Scalar;
  }();
  return chosen;
}

#if !defined(ARMTWIN_HAVE_AVX2_KERNELS)
namespace detail {
void fk_batch_avx2(const FkBatchArgs&) { throw std::logic_error("avx2 kernels not built"); }
void sincos_avx2(const double*, double*, double*, std::size_t) {
  throw std::logic_error("avx2 kernels not built");
}
}  // namespace detail
#endif

}  // namespace simd

JointBatch::JointBatch(std::span<const JointAngles> poses) {
  reserve(poses.size());
  for (const auto& q : poses) push_back(q);
}

void JointBatch::push_back(const JointAngles& q) {
  for (std::size_t j = 0; j < kJointCount; ++j) theta_[j].push_back(q[j]);
}

void JointBatch::reserve(std::size_t n) {
  for (auto& column : theta_) column.reserve(n);
}

JointAngles JointBatch::at(std::size_t i) const {
  JointAngles q;
  for (std::size_t j = 0; j < kJointCount; ++j) q[j] = theta_[j].at(i);
  return q;
}

PositionBatch fk_position_batch(const JointBatch& poses, const LinkLengths& links) {
  return fk_position_batch(poses, links, simd::active_kernel());
}

PositionBatch fk_position_batch(const JointBatch& poses, const LinkLengths& links,
                                simd::Kernel kernel) {
  if (!simd::kernel_supported(kernel)) {
    throw std::invalid_argument("kernel not supported on this CPU: " +
                                std::string(simd::to_string(kernel)));
  }
  const std::size_t n = poses.size();
  PositionBatch out;
  out.x.resize(n);
  out.y.resize(n);
  out.z.resize(n);

  const simd::detail::FkBatchArgs args{
      poses.joint(0).data(), poses.joint(1).data(), poses.joint(2).data(),
      poses.joint(3).data(), out.x.data(),          out.y.data(),
      out.z.data(),          n,                     links.a1,
      links.a2,              links.a3,              links.a4};

  if (kernel == simd::Kernel::Avx2) {
    simd::detail::fk_batch_avx2(args);
  } else {
    simd::detail::fk_batch_scalar(args);
  }
  return out;
}

}  // namespace armtwin
