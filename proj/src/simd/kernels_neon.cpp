#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace depthlab::simd {

namespace {

// Lanes 0,1 live in `lo` and lanes 2,3 in `hi`, matching the scalar layout.
template <RealMetric M>
inline void quad_sq(const double* a, const double* b, std::size_t n, std::size_t dim, std::size_t i, float64x2_t& lo,
                    float64x2_t& hi) {
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  for (std::size_t c = 0; c < dim; ++c) {
    float64x2_t d0 = vsubq_f64(vld1q_f64(a + c * n + i), vld1q_f64(b + c * n + i));
    float64x2_t d1 = vsubq_f64(vld1q_f64(a + c * n + i + 2), vld1q_f64(b + c * n + i + 2));
    if constexpr (M == RealMetric::Circular) {
      d0 = vabsq_f64(d0);
      d1 = vabsq_f64(d1);
      d0 = vminq_f64(d0, vsubq_f64(one, d0));
      d1 = vminq_f64(d1, vsubq_f64(one, d1));
    }
    s0 = vaddq_f64(s0, vmulq_f64(d0, d0));
    s1 = vaddq_f64(s1, vmulq_f64(d1, d1));
  }
  if constexpr (M == RealMetric::Capped) {
    s0 = vminq_f64(s0, one);
    s1 = vminq_f64(s1, one);
  }
  lo = s0;
  hi = s1;
}

template <RealMetric M>
double real_sum_impl(const double* a, const double* b, std::size_t n, std::size_t dim, double stop) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  double lanes[4];
  const std::size_t full = n & ~std::size_t{3};
  for (std::size_t i0 = 0; i0 < n; i0 += kEarlyExitBlock) {
    std::size_t i1 = std::min(n, i0 + kEarlyExitBlock);
    std::size_t q1 = std::min(i1, full);
    for (std::size_t i = i0; i < q1; i += 4) {
      float64x2_t lo, hi;
      quad_sq<M>(a, b, n, dim, i, lo, hi);
      acc0 = vaddq_f64(acc0, lo);
      acc1 = vaddq_f64(acc1, hi);
    }
    if (i1 < n) {
      vst1q_f64(lanes, acc0);
      vst1q_f64(lanes + 2, acc1);
      double part = detail::combine(lanes);
      if (part > stop) return part;
    }
  }
  vst1q_f64(lanes, acc0);
  vst1q_f64(lanes + 2, acc1);
  for (std::size_t i = full; i < n; ++i) lanes[i & 3] += detail::probe_sq(M, a, b, n, dim, i);
  return detail::combine(lanes);
}

template <RealMetric M>
double real_max_impl(const double* a, const double* b, std::size_t n, std::size_t dim, double stop) {
  float64x2_t best0 = vdupq_n_f64(0.0);
  float64x2_t best1 = vdupq_n_f64(0.0);
  const std::size_t full = n & ~std::size_t{3};
  double tail = 0.0;
  for (std::size_t i0 = 0; i0 < n; i0 += kEarlyExitBlock) {
    std::size_t i1 = std::min(n, i0 + kEarlyExitBlock);
    std::size_t q1 = std::min(i1, full);
    for (std::size_t i = i0; i < q1; i += 4) {
      float64x2_t lo, hi;
      quad_sq<M>(a, b, n, dim, i, lo, hi);
      best0 = vmaxq_f64(best0, lo);
      best1 = vmaxq_f64(best1, hi);
    }
    if (i1 == n)
      for (std::size_t i = full; i < n; ++i) tail = std::max(tail, detail::probe_sq(M, a, b, n, dim, i));
    double m = std::max(vmaxvq_f64(vmaxq_f64(best0, best1)), tail);
    if (m >= stop || i1 == n) return m;
  }
  return 0.0;
}

double real_sum_neon(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim, double stop) {
  switch (m) {
    case RealMetric::Euclid: return real_sum_impl<RealMetric::Euclid>(a, b, n, dim, stop);
    case RealMetric::Circular: return real_sum_impl<RealMetric::Circular>(a, b, n, dim, stop);
    case RealMetric::Capped: return real_sum_impl<RealMetric::Capped>(a, b, n, dim, stop);
  }
  return 0.0;
}

double real_max_neon(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim, double stop) {
  switch (m) {
    case RealMetric::Euclid: return real_max_impl<RealMetric::Euclid>(a, b, n, dim, stop);
    case RealMetric::Circular: return real_max_impl<RealMetric::Circular>(a, b, n, dim, stop);
    case RealMetric::Capped: return real_max_impl<RealMetric::Capped>(a, b, n, dim, stop);
  }
  return 0.0;
}

void cell_mismatch_neon(const std::uint8_t* a, const std::uint8_t* b, std::size_t ncells, std::size_t cell,
                        std::uint32_t* out) {
  for (std::size_t j = 0; j < ncells; ++j) {
    const std::uint8_t* pa = a + j * cell;
    const std::uint8_t* pb = b + j * cell;
    std::size_t t = 0;
    // Skip equal 16-byte chunks, then locate the byte.
    for (; t + 16 <= cell; t += 16) {
      uint8x16_t eq = vceqq_u8(vld1q_u8(pa + t), vld1q_u8(pb + t));
      if (vminvq_u8(eq) != 0xFF) break;
    }
    while (t < cell && pa[t] == pb[t]) ++t;
    out[j] = static_cast<std::uint32_t>(t);
  }
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{"neon", real_sum_neon, real_max_neon, cell_mismatch_neon};
  return &table;
}

}  // namespace depthlab::simd
