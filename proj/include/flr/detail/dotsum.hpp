// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace flr::detail {

// Fixed-order dot product: four independent accumulators over the leading
// 4*(n/4) terms, a scalar tail, then ((s0+s1)+(s2+s3))+tail. The summation
// pattern depends only on n, never on data alignment or surrounding matrix
// shapes, so an entry computed from the same two vectors is bit-identical
// at every call site.
inline double dot_ordered(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

// out[p] += c * col[p]. Each out entry receives exactly one fused update per
// call, so accumulation order over successive calls is the call order.
inline void axpy_ordered(double c, const double* col, double* out, std::size_t n) {
  for (std::size_t p = 0; p < n; ++p) out[p] += c * col[p];
}

}  // namespace flr::detail
