// linalg: dense symmetric eigendecomposition (cyclic Jacobi) for small matrices.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "histadapt/common.hpp"

namespace histadapt {

// Eigen-decomposes the symmetric n x n matrix `a` (row-major, destroyed).
// Returns eigenvalues in descending order; `vectors[i]` is the unit
// eigenvector of eigenvalue i (length n).
inline void jacobi_eigen_symmetric(std::vector<double> a, std::size_t n,
                                   std::vector<double>& values,
                                   std::vector<std::vector<double>>& vectors) {
  if (a.size() != n * n) throw Error("jacobi: matrix size mismatch");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(2.0 * s);
  };
  double base = 0.0;
  for (double x : a) base += x * x;
  base = std::sqrt(base);
  const double tol = std::max(base, 1.0) * 1e-14;

  for (int sweep = 0; sweep < 64 && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) <= tol / static_cast<double>(n)) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i * n + p];
          const double aiq = a[i * n + q];
          a[i * n + p] = c * aip - s * aiq;
          a[i * n + q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p * n + i];
          const double aqi = a[q * n + i];
          a[p * n + i] = c * api - s * aqi;
          a[q * n + i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v[i * n + p];
          const double viq = v[i * n + q];
          v[i * n + p] = c * vip - s * viq;
          v[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  values.resize(n);
  vectors.assign(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    values[r] = a[idx[r] * n + idx[r]];
    for (std::size_t i = 0; i < n; ++i) vectors[r][i] = v[i * n + idx[r]];
  }
}

// Modified Gram-Schmidt over the rows of a K x D row-major matrix.
inline void orthonormalize_rows(std::vector<double>& m, std::size_t k, std::size_t d) {
  for (std::size_t i = 0; i < k; ++i) {
    double* ri = m.data() + i * d;
    for (std::size_t j = 0; j < i; ++j) {
      const double* rj = m.data() + j * d;
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += ri[c] * rj[c];
      for (std::size_t c = 0; c < d; ++c) ri[c] -= dot * rj[c];
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < d; ++c) norm += ri[c] * ri[c];
    norm = std::sqrt(norm);
    if (norm < 1e-15) throw Error("orthonormalize: rank-deficient basis");
    for (std::size_t c = 0; c < d; ++c) ri[c] /= norm;
  }
}

}  // namespace histadapt
