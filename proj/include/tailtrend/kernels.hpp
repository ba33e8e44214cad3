#ifndef TAILTREND_KERNELS_HPP
#define TAILTREND_KERNELS_HPP

#include <cstddef>

// Inner-loop arithmetic kernels with a scalar reference implementation and an
// AVX2 variant selected at runtime. Both variants use the same accumulation
// order (four interleaved partial sums, combined as (s0+s1)+(s2+s3), tail
// elements appended sequentially), so results are bit-identical across
// backends. Reductions must keep that order; elementwise ops are order-free.
namespace tailtrend::kern {

enum class Backend { scalar, avx2 };

bool avx2_available();
Backend active_backend();
const char* backend_name(Backend b);
// Overrides auto-detection (also honours the TAILTREND_KERNELS=scalar|avx2
// environment variable on first use). Throws if the backend is unsupported.
void force_backend(Backend b);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// acc[i] += c * x[i]
void add_scaled(double* acc, const double* x, double c, std::size_t n);

// out[i] = bi[i] - r1[i]*bu[i] - r2[i]*bv[i]
void bridge_combine(const double* bi, const double* bu, const double* bv,
                    const double* r1, const double* r2, double* out, std::size_t n);

// *absmax = max_i |x[i]|, *wsumsq = sum_i x[i]^2 * w[i]
void absmax_wsumsq(const double* x, const double* w, std::size_t n,
                   double* absmax, double* wsumsq);

namespace detail {
struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  void (*add_scaled)(double*, const double*, double, std::size_t);
  void (*bridge_combine)(const double*, const double*, const double*,
                         const double*, const double*, double*, std::size_t);
  void (*absmax_wsumsq)(const double*, const double*, std::size_t, double*, double*);
};
const Ops& scalar_ops();
const Ops& avx2_ops();  // valid only when avx2_available()
}  // namespace detail

}  // namespace tailtrend::kern

#endif  // TAILTREND_KERNELS_HPP
