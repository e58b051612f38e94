#include "fixpoint/kernels.hpp"

#include <cmath>

// Reference kernels. The min/max helpers mirror the SIMD instruction
// semantics (second operand returned on ties) so clamp and soft_threshold
// stay bit-identical across backends even for signed zeros.

namespace fixpoint::kernels {
namespace {

inline double max2(double a, double b) { return a > b ? a : b; }
inline double min2(double a, double b) { return a < b ? a : b; }

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double diff_sumsq_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = max2(m, std::fabs(x[i]));
  return m;
}

void scale_scalar(double* out, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void axpy_scalar(double* acc, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a * x[i];
}

void axpby_scalar(double* out, double a, const double* x, double b, const double* y,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void lincomb3_scalar(double* out, double a, const double* x, double b, const double* y,
                     double c, const double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void soft_threshold_scalar(double* out, const double* x, double t, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = max2(std::fabs(x[i]) - t, 0.0);
    out[i] = std::copysign(m, x[i]);
  }
}

void clamp_scalar(double* out, const double* x, const double* lo, const double* hi,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = min2(max2(x[i], lo[i]), hi[i]);
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{
      "scalar",        dot_scalar,   sumsq_scalar,    diff_sumsq_scalar,
      max_abs_scalar,  scale_scalar, axpy_scalar,     axpby_scalar,
      lincomb3_scalar, soft_threshold_scalar, clamp_scalar,
  };
  return b;
}

}  // namespace fixpoint::kernels
