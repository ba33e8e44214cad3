#include "tailtrend/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace tailtrend::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double r = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void add_scaled_scalar(double* acc, const double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += c * x[i];
}

void bridge_combine_scalar(const double* bi, const double* bu, const double* bv,
                           const double* r1, const double* r2, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = bi[i] - r1[i] * bu[i] - r2[i] * bv[i];
}

void absmax_wsumsq_scalar(const double* x, const double* w, std::size_t n,
                          double* absmax, double* wsumsq) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double a0 = std::fabs(x[i]), a1 = std::fabs(x[i + 1]);
    const double a2 = std::fabs(x[i + 2]), a3 = std::fabs(x[i + 3]);
    if (a0 > m0) m0 = a0;
    if (a1 > m1) m1 = a1;
    if (a2 > m2) m2 = a2;
    if (a3 > m3) m3 = a3;
    s0 += x[i] * x[i] * w[i];
    s1 += x[i + 1] * x[i + 1] * w[i + 1];
    s2 += x[i + 2] * x[i + 2] * w[i + 2];
    s3 += x[i + 3] * x[i + 3] * w[i + 3];
  }
  double m = m0 > m1 ? m0 : m1;
  if (m2 > m) m = m2;
  if (m3 > m) m = m3;
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
    s += x[i] * x[i] * w[i];
  }
  *absmax = m;
  *wsumsq = s;
}

const detail::Ops kScalarOps = {dot_scalar, add_scaled_scalar,
                                bridge_combine_scalar, absmax_wsumsq_scalar};

std::atomic<const detail::Ops*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const detail::Ops* init_ops() {
  Backend want = avx2_available() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("TAILTREND_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") want = Backend::scalar;
    else if (v == "avx2" && avx2_available()) want = Backend::avx2;
  }
  const detail::Ops* ops =
      want == Backend::avx2 ? &detail::avx2_ops() : &detail::scalar_ops();
  g_backend.store(want, std::memory_order_relaxed);
  g_ops.store(ops, std::memory_order_release);
  return ops;
}

inline const detail::Ops* ops() {
  const detail::Ops* p = g_ops.load(std::memory_order_acquire);
  return p ? p : init_ops();
}

}  // namespace

const detail::Ops& detail::scalar_ops() { return kScalarOps; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() {
  ops();
  return g_backend.load(std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available())
    throw std::runtime_error("kernels: avx2 backend not available on this cpu");
  g_backend.store(b, std::memory_order_relaxed);
  g_ops.store(b == Backend::avx2 ? &detail::avx2_ops() : &detail::scalar_ops(),
              std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) {
  return ops()->dot(a, b, n);
}

void add_scaled(double* acc, const double* x, double c, std::size_t n) {
  ops()->add_scaled(acc, x, c, n);
}

void bridge_combine(const double* bi, const double* bu, const double* bv,
                    const double* r1, const double* r2, double* out,
                    std::size_t n) {
  ops()->bridge_combine(bi, bu, bv, r1, r2, out, n);
}

void absmax_wsumsq(const double* x, const double* w, std::size_t n,
                   double* absmax, double* wsumsq) {
  ops()->absmax_wsumsq(x, w, n, absmax, wsumsq);
}

}  // namespace tailtrend::kern
