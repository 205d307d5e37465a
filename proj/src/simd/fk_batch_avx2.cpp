// AVX2 + FMA kernels, 4 doubles per lane group. Compiled with -mavx2 -mfma;
// only reached after the runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include "simd/kernels.hpp"

namespace armtwin::simd::detail {

namespace {

// Cody-Waite split of pi/2 and the minimax sin/cos polynomials on
// [-pi/4, pi/4] (Cephes coefficients).
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2Hi = 1.57079625129699707031e+00;
constexpr double kPio2Mid = 7.54978941586159635335e-08;
constexpr double kPio2Lo = 5.39030285815811905290e-15;

constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                            2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                            8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                            -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                            -1.38888888888730564116e-3,  4.16666666666665929218e-2};

inline __m256d horner(__m256d z, const double (&c)[6]) {
  __m256d acc = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) acc = _mm256_fmadd_pd(acc, z, _mm256_set1_pd(c[i]));
  return acc;
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2Lo), r);

  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), horner(z, kSin), r);
  const __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), horner(z, kCos),
                                    _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z,
                                                     _mm256_set1_pd(1.0)));

  // Quadrant bookkeeping in 64-bit integer lanes.
  const __m256i quadrant = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);

  const __m256d swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(quadrant, one), one));
  const __m256d sin_sign =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(quadrant, two), 62));
  const __m256d cos_sign = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(quadrant, one), two), 62));

  s_out = _mm256_xor_pd(_mm256_blendv_pd(s, c, swap), sin_sign);
  c_out = _mm256_xor_pd(_mm256_blendv_pd(c, s, swap), cos_sign);
}

// Masked load/store so the tail goes through the same arithmetic.
inline __m256i tail_mask(std::size_t remaining) {
  const __m256i lanes = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), lanes);
}

}  // namespace

void sincos_avx2(const double* in, double* sin_out, double* cos_out, std::size_t n) {
  for (std::size_t i = 0; i < n; i += 4) {
    const __m256i mask = tail_mask(n - i);
    __m256d s, c;
    sincos4(_mm256_maskload_pd(in + i, mask), s, c);
    _mm256_maskstore_pd(sin_out + i, mask, s);
    _mm256_maskstore_pd(cos_out + i, mask, c);
  }
}

void fk_batch_avx2(const FkBatchArgs& a) {
  const __m256d a1 = _mm256_set1_pd(a.a1);
  const __m256d a2 = _mm256_set1_pd(a.a2);
  const __m256d a3 = _mm256_set1_pd(a.a3);
  const __m256d a4 = _mm256_set1_pd(a.a4);

  for (std::size_t i = 0; i < a.n; i += 4) {
    const __m256i mask = tail_mask(a.n - i);
    const __m256d t1 = _mm256_maskload_pd(a.theta1 + i, mask);
    const __m256d t2 = _mm256_maskload_pd(a.theta2 + i, mask);
    const __m256d elbow = _mm256_add_pd(t2, _mm256_maskload_pd(a.theta3 + i, mask));
    const __m256d wrist = _mm256_add_pd(elbow, _mm256_maskload_pd(a.theta4 + i, mask));

    __m256d s1, c1, s2, c2, se, ce, sw, cw;
    sincos4(t1, s1, c1);
    sincos4(t2, s2, c2);
    sincos4(elbow, se, ce);
    sincos4(wrist, sw, cw);

    const __m256d radial =
        _mm256_fmadd_pd(a4, cw, _mm256_fmadd_pd(a3, ce, _mm256_mul_pd(a2, s2)));
    const __m256d z =
        _mm256_fnmadd_pd(a4, sw, _mm256_fnmadd_pd(a3, se, _mm256_fmadd_pd(a2, c2, a1)));

    _mm256_maskstore_pd(a.x + i, mask, _mm256_mul_pd(c1, radial));
    _mm256_maskstore_pd(a.y + i, mask, _mm256_mul_pd(s1, radial));
    _mm256_maskstore_pd(a.z + i, mask, z);
  }
}

}  // namespace armtwin::simd::detail
