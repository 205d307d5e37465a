#pragma once

// Raw-pointer kernel entry points. Kept free of standard-library headers so
// the AVX2 translation unit compiles nothing that could be shared with
// baseline code.

#include <cstddef>

namespace armtwin::simd::detail {

struct FkBatchArgs {
  const double* theta1;
  const double* theta2;
  const double* theta3;
  const double* theta4;
  double* x;
  double* y;
  double* z;
  std::size_t n;
  double a1, a2, a3, a4;
};

void fk_batch_scalar(const FkBatchArgs& args);
void fk_batch_avx2(const FkBatchArgs& args);

void sincos_avx2(const double* in, double* sin_out, double* cos_out, std::size_t n);

}  // namespace armtwin::simd::detail
