#include "fixpoint/kernels.hpp"

#if defined(FIXPOINT_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

// AVX2 variants. Four doubles per lane group, scalar loop for the remainder.
// Elementwise kernels use explicit mul+add (no FMA) to match the scalar
// backend bit-for-bit. Reductions accumulate per lane and collapse left to
// right at the end, so they are deterministic but may round differently from
// the scalar loop.

namespace fixpoint::kernels {
namespace {

inline double max2(double a, double b) { return a > b ? a : b; }
inline double min2(double a, double b) { return a < b ? a : b; }

inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

inline double hmax(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return max2(max2(max2(lane[0], lane[1]), lane[2]), lane[3]);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(xv, yv));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double sumsq_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(xv, xv));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

double diff_sumsq_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    r += d * d;
  }
  return r;
}

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_andnot_pd(signmask, _mm256_loadu_pd(x + i));
    acc = _mm256_max_pd(acc, a);
  }
  double r = hmax(acc);
  for (; i < n; ++i) r = max2(r, std::fabs(x[i]));
  return r;
}

void scale_avx2(double* out, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = a * x[i];
}

void axpy_avx2(double* acc, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(acc + i, r);
  }
  for (; i < n; ++i) acc[i] += a * x[i];
}

void axpby_avx2(double* out, double a, const double* x, double b, const double* y,
                std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_mul_pd(av, _mm256_loadu_pd(x + i)),
                                    _mm256_mul_pd(bv, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lincomb3_avx2(double* out, double a, const double* x, double b, const double* y,
                   double c, const double* z, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    r = _mm256_add_pd(r, _mm256_mul_pd(bv, _mm256_loadu_pd(y + i)));
    r = _mm256_add_pd(r, _mm256_mul_pd(cv, _mm256_loadu_pd(z + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void soft_threshold_avx2(double* out, const double* x, double t, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  const __m256d tv = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mag = _mm256_max_pd(_mm256_sub_pd(_mm256_andnot_pd(signmask, xv), tv), zero);
    _mm256_storeu_pd(out + i, _mm256_or_pd(mag, _mm256_and_pd(signmask, xv)));
  }
  for (; i < n; ++i) {
    const double m = max2(std::fabs(x[i]) - t, 0.0);
    out[i] = std::copysign(m, x[i]);
  }
}

void clamp_avx2(double* out, const double* x, const double* lo, const double* hi,
                std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(lo + i)),
                                    _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = min2(max2(x[i], lo[i]), hi[i]);
}

}  // namespace

const Backend& avx2_backend() {
  static const Backend b{
      "avx2",        dot_avx2,   sumsq_avx2,    diff_sumsq_avx2,
      max_abs_avx2,  scale_avx2, axpy_avx2,     axpby_avx2,
      lincomb3_avx2, soft_threshold_avx2, clamp_avx2,
  };
  return b;
}

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

}  // namespace fixpoint::kernels

#endif  // FIXPOINT_HAVE_AVX2
