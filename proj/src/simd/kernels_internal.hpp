#pragma once

#include <algorithm>
#include <cmath>

#include "depthlab/simd/kernels.hpp"

namespace depthlab::simd::detail {

inline double probe_sq(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim, std::size_t i) {
  double s = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    double d = a[c * n + i] - b[c * n + i];
    if (m == RealMetric::Circular) {
      d = std::fabs(d);
      d = std::min(d, 1.0 - d);
    }
    s = s + d * d;
  }
  if (m == RealMetric::Capped) s = std::min(s, 1.0);
  return s;
}

inline double combine(const double* lanes) { return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]); }

}  // namespace depthlab::simd::detail
