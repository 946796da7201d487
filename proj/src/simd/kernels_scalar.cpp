#include <cmath>

#include "kernels_internal.hpp"

namespace depthlab::simd {

namespace {

double real_sum_scalar(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim, double stop) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i0 = 0; i0 < n; i0 += kEarlyExitBlock) {
    std::size_t i1 = std::min(n, i0 + kEarlyExitBlock);
    for (std::size_t i = i0; i < i1; ++i) lanes[i & 3] += detail::probe_sq(m, a, b, n, dim, i);
    if (i1 < n) {
      double part = detail::combine(lanes);
      if (part > stop) return part;
    }
  }
  return detail::combine(lanes);
}

double real_max_scalar(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim, double stop) {
  double best = 0.0;
  for (std::size_t i0 = 0; i0 < n; i0 += kEarlyExitBlock) {
    std::size_t i1 = std::min(n, i0 + kEarlyExitBlock);
    for (std::size_t i = i0; i < i1; ++i) best = std::max(best, detail::probe_sq(m, a, b, n, dim, i));
    if (best >= stop) return best;
  }
  return best;
}

void cell_mismatch_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t ncells, std::size_t cell,
                          std::uint32_t* out) {
  for (std::size_t j = 0; j < ncells; ++j) {
    const std::uint8_t* pa = a + j * cell;
    const std::uint8_t* pb = b + j * cell;
    std::size_t t = 0;
    while (t < cell && pa[t] == pb[t]) ++t;
    out[j] = static_cast<std::uint32_t>(t);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", real_sum_scalar, real_max_scalar, cell_mismatch_scalar};
  return table;
}

}  // namespace depthlab::simd
