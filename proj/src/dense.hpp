#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fixpoint/errors.hpp"

// Dense helpers for the tiny symmetric systems the operator catalogue needs
// (Gram pseudoinverses for affine projections, PSD checks, resolvent solves).
// Row-major square matrices, dimensions are desk scale so O(n^3) sweeps are
// fine.

namespace fixpoint::dense {

struct SymEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column k of the n*n matrix is eigenvector k
};

// Cyclic Jacobi iteration for a symmetric matrix (row-major n*n).
inline SymEigen sym_eigen(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::fabs(x));
  const double tol = std::max(scale * scale * 1e-28, 1e-300);

  for (int sweep = 0; sweep < 100 && off() > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
  }

  SymEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
  out.vectors = std::move(v);
  // selection sort keeps vectors aligned with values
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t m = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (out.values[j] < out.values[m]) m = j;
    if (m != i) {
      std::swap(out.values[i], out.values[m]);
      for (std::size_t k = 0; k < n; ++k) std::swap(out.vectors[k * n + i], out.vectors[k * n + m]);
    }
  }
  return out;
}

// Moore-Penrose pseudoinverse of a symmetric PSD matrix via its
// eigendecomposition; eigenvalues below rel_tol * max are treated as zero.
inline std::vector<double> sym_pinv(const std::vector<double>& a, std::size_t n,
                                    double rel_tol = 1e-12) {
  const SymEigen eg = sym_eigen(a, n);
  double lmax = 0.0;
  for (double l : eg.values) lmax = std::max(lmax, std::fabs(l));
  const double cut = std::max(lmax * rel_tol, 1e-300);
  std::vector<double> out(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (eg.values[k] <= cut) continue;
    const double w = 1.0 / eg.values[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out[i * n + j] += w * eg.vectors[i * n + k] * eg.vectors[j * n + k];
  }
  return out;
}

// Solves A x = b for symmetric positive definite A (row-major, overwritten).
inline std::vector<double> spd_solve(std::vector<double> a, std::vector<double> b,
                                     std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) throw argument_error("matrix is not positive definite");
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return b;
}

}  // namespace fixpoint::dense
