#pragma once

#include <cstddef>
#include <vector>

// Vector kernels used by the iteration engine and the space diagnostics.
// Every operation has a scalar reference implementation; on x86-64 an AVX2
// variant is compiled alongside and selected at runtime, on aarch64 a NEON
// variant is compiled in unconditionally. Elementwise kernels (scale, axpy,
// axpby, lincomb3, soft_threshold, clamp) are bit-identical across backends
// because they use only mul/add/min/max/bit ops and contraction is disabled.
// Reductions (dot, sumsq, diff_sumsq, max_abs) may differ in the last few ulps
// between backends since SIMD accumulates in lanes.

namespace fixpoint::kernels {

struct Backend {
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sumsq)(const double* x, std::size_t n);
  double (*diff_sumsq)(const double* x, const double* y, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);

  // out = a*x
  void (*scale)(double* out, double a, const double* x, std::size_t n);
  // acc += a*x
  void (*axpy)(double* acc, double a, const double* x, std::size_t n);
  // out = a*x + b*y
  void (*axpby)(double* out, double a, const double* x, double b, const double* y, std::size_t n);
  // out = a*x + b*y + c*z, summed left to right per element
  void (*lincomb3)(double* out, double a, const double* x, double b, const double* y,
                   double c, const double* z, std::size_t n);
  // out_i = sign(x_i) * max(|x_i| - t, 0)
  void (*soft_threshold)(double* out, const double* x, double t, std::size_t n);
  // out_i = min(max(x_i, lo_i), hi_i)
  void (*clamp)(double* out, const double* x, const double* lo, const double* hi, std::size_t n);
};

const Backend& scalar_backend();

#if defined(FIXPOINT_HAVE_AVX2)
const Backend& avx2_backend();
bool avx2_supported();
#endif
#if defined(FIXPOINT_HAVE_NEON)
const Backend& neon_backend();
#endif

// Backend chosen once per process: FIXPOINT_KERNELS=scalar|avx2|neon forces a
// choice (falling back to scalar with a note on stderr if unavailable),
// otherwise the best supported variant wins.
const Backend& active();

// All backends compiled into this build, scalar first. Used by the
// equivalence tests.
const std::vector<const Backend*>& compiled_backends();

}  // namespace fixpoint::kernels
