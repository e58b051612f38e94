#include "fixpoint/kernels.hpp"

#if defined(FIXPOINT_HAVE_NEON)

#include <arm_neon.h>

#include <cmath>

// NEON variants for aarch64, two doubles per vector. Same layout as the AVX2
// file: explicit mul+add, scalar remainder loop.

namespace fixpoint::kernels {
namespace {

inline double max2(double a, double b) { return a > b ? a : b; }
inline double min2(double a, double b) { return a < b ? a : b; }

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double sumsq_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    acc = vaddq_f64(acc, vmulq_f64(xv, xv));
  }
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

double diff_sumsq_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vaddq_f64(acc, vmulq_f64(d, d));
  }
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    r += d * d;
  }
  return r;
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
  double r = max2(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
  for (; i < n; ++i) r = max2(r, std::fabs(x[i]));
  return r;
}

void scale_neon(double* out, double a, const double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void axpy_neon(double* acc, double a, const double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(av, vld1q_f64(x + i))));
  for (; i < n; ++i) acc[i] += a * x[i];
}

void axpby_neon(double* out, double a, const double* x, double b, const double* y,
                std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  const float64x2_t bv = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vaddq_f64(vmulq_f64(av, vld1q_f64(x + i)),
                                 vmulq_f64(bv, vld1q_f64(y + i))));
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lincomb3_neon(double* out, double a, const double* x, double b, const double* y,
                   double c, const double* z, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  const float64x2_t bv = vdupq_n_f64(b);
  const float64x2_t cv = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vmulq_f64(av, vld1q_f64(x + i));
    r = vaddq_f64(r, vmulq_f64(bv, vld1q_f64(y + i)));
    r = vaddq_f64(r, vmulq_f64(cv, vld1q_f64(z + i)));
    vst1q_f64(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void soft_threshold_neon(double* out, const double* x, double t, std::size_t n) {
  const float64x2_t tv = vdupq_n_f64(t);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const uint64x2_t signmask = vdupq_n_u64(0x8000000000000000ull);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const float64x2_t mag = vmaxq_f64(vsubq_f64(vabsq_f64(xv), tv), zero);
    const uint64x2_t sign = vandq_u64(vreinterpretq_u64_f64(xv), signmask);
    vst1q_f64(out + i, vreinterpretq_f64_u64(vorrq_u64(vreinterpretq_u64_f64(mag), sign)));
  }
  for (; i < n; ++i) {
    const double m = max2(std::fabs(x[i]) - t, 0.0);
    out[i] = std::copysign(m, x[i]);
  }
}

void clamp_neon(double* out, const double* x, const double* lo, const double* hi,
                std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vminq_f64(vmaxq_f64(vld1q_f64(x + i), vld1q_f64(lo + i)),
                                 vld1q_f64(hi + i)));
  for (; i < n; ++i) out[i] = min2(max2(x[i], lo[i]), hi[i]);
}

}  // namespace

const Backend& neon_backend() {
  static const Backend b{
      "neon",        dot_neon,   sumsq_neon,    diff_sumsq_neon,
      max_abs_neon,  scale_neon, axpy_neon,     axpby_neon,
      lincomb3_neon, soft_threshold_neon, clamp_neon,
  };
  return b;
}

}  // namespace fixpoint::kernels

#endif  // FIXPOINT_HAVE_NEON
