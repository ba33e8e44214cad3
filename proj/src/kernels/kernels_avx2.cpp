// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2; nothing here runs unless runtime detection (or force_backend)
// selected the avx2 backend. No FMA intrinsics: each multiply and add rounds
// separately, matching the scalar reference bit for bit.

#include "tailtrend/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

namespace tailtrend::kern {
namespace {

inline double hsum_ordered(__m256d acc) {
  double lane[4];
  _mm256_storeu_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double r = hsum_ordered(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void add_scaled_avx2(double* acc, const double* x, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(acc + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(va, _mm256_mul_pd(vc, vx)));
  }
  for (; i < n; ++i) acc[i] += c * x[i];
}

void bridge_combine_avx2(const double* bi, const double* bu, const double* bv,
                         const double* r1, const double* r2, double* out,
                         std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vbi = _mm256_loadu_pd(bi + i);
    const __m256d t1 = _mm256_mul_pd(_mm256_loadu_pd(r1 + i), _mm256_loadu_pd(bu + i));
    const __m256d t2 = _mm256_mul_pd(_mm256_loadu_pd(r2 + i), _mm256_loadu_pd(bv + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_sub_pd(vbi, t1), t2));
  }
  for (; i < n; ++i) out[i] = bi[i] - r1[i] * bu[i] - r2[i] * bv[i];
}

void absmax_wsumsq_avx2(const double* x, const double* w, std::size_t n,
                        double* absmax, double* wsumsq) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  __m256d vsum = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vw = _mm256_loadu_pd(w + i);
    vmax = _mm256_max_pd(vmax, _mm256_andnot_pd(sign_mask, vx));
    vsum = _mm256_add_pd(vsum, _mm256_mul_pd(_mm256_mul_pd(vx, vx), vw));
  }
  double lane[4];
  _mm256_storeu_pd(lane, vmax);
  double m = lane[0] > lane[1] ? lane[0] : lane[1];
  if (lane[2] > m) m = lane[2];
  if (lane[3] > m) m = lane[3];
  double s = hsum_ordered(vsum);
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
    s += x[i] * x[i] * w[i];
  }
  *absmax = m;
  *wsumsq = s;
}

const detail::Ops kAvx2Ops = {dot_avx2, add_scaled_avx2, bridge_combine_avx2,
                              absmax_wsumsq_avx2};

}  // namespace

const detail::Ops& detail::avx2_ops() { return kAvx2Ops; }

}  // namespace tailtrend::kern

#else  // non-x86: the avx2 table is never selected, alias the scalar one

namespace tailtrend::kern {
const detail::Ops& detail::avx2_ops() { return detail::scalar_ops(); }
}  // namespace tailtrend::kern

#endif
