#include <immintrin.h>

#include "kernels_internal.hpp"

namespace depthlab::simd {

namespace {

template <RealMetric M>
__attribute__((target("avx2"))) inline __m256d quad_sq(const double* a, const double* b, std::size_t n,
                                                       std::size_t dim, std::size_t i) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_setzero_pd();
  for (std::size_t c = 0; c < dim; ++c) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + c * n + i), _mm256_loadu_pd(b + c * n + i));
    if constexpr (M == RealMetric::Circular) {
      d = _mm256_andnot_pd(sign, d);
      d = _mm256_min_pd(d, _mm256_sub_pd(one, d));
    }
    s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
  }
  if constexpr (M == RealMetric::Capped) s = _mm256_min_pd(s, one);
  return s;
}

template <RealMetric M>
__attribute__((target("avx2"))) double real_sum_impl(const double* a, const double* b, std::size_t n,
                                                     std::size_t dim, double stop) {
  __m256d acc = _mm256_setzero_pd();
  alignas(32) double lanes[4];
  const std::size_t full = n & ~std::size_t{3};
  for (std::size_t i0 = 0; i0 < n; i0 += kEarlyExitBlock) {
    std::size_t i1 = std::min(n, i0 + kEarlyExitBlock);
    std::size_t q1 = std::min(i1, full);
    for (std::size_t i = i0; i < q1; i += 4) acc = _mm256_add_pd(acc, quad_sq<M>(a, b, n, dim, i));
    if (i1 < n) {
      _mm256_store_pd(lanes, acc);
      double part = detail::combine(lanes);
      if (part > stop) return part;
    }
  }
  _mm256_store_pd(lanes, acc);
  for (std::size_t i = full; i < n; ++i) lanes[i & 3] += detail::probe_sq(M, a, b, n, dim, i);
  return detail::combine(lanes);
}

template <RealMetric M>
__attribute__((target("avx2"))) double real_max_impl(const double* a, const double* b, std::size_t n,
                                                     std::size_t dim, double stop) {
  __m256d best = _mm256_setzero_pd();
  alignas(32) double lanes[4];
  const std::size_t full = n & ~std::size_t{3};
  double tail = 0.0;
  for (std::size_t i0 = 0; i0 < n; i0 += kEarlyExitBlock) {
    std::size_t i1 = std::min(n, i0 + kEarlyExitBlock);
    std::size_t q1 = std::min(i1, full);
    for (std::size_t i = i0; i < q1; i += 4) best = _mm256_max_pd(best, quad_sq<M>(a, b, n, dim, i));
    if (i1 == n)
      for (std::size_t i = full; i < n; ++i) tail = std::max(tail, detail::probe_sq(M, a, b, n, dim, i));
    _mm256_store_pd(lanes, best);
    double m = std::max(std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3])), tail);
    if (m >= stop || i1 == n) return m;
  }
  return 0.0;
}

__attribute__((target("avx2"))) double real_sum_avx2(RealMetric m, const double* a, const double* b, std::size_t n,
                                                     std::size_t dim, double stop) {
  switch (m) {
    case RealMetric::Euclid: return real_sum_impl<RealMetric::Euclid>(a, b, n, dim, stop);
    case RealMetric::Circular: return real_sum_impl<RealMetric::Circular>(a, b, n, dim, stop);
    case RealMetric::Capped: return real_sum_impl<RealMetric::Capped>(a, b, n, dim, stop);
  }
  return 0.0;
}

__attribute__((target("avx2"))) double real_max_avx2(RealMetric m, const double* a, const double* b, std::size_t n,
                                                     std::size_t dim, double stop) {
  switch (m) {
    case RealMetric::Euclid: return real_max_impl<RealMetric::Euclid>(a, b, n, dim, stop);
    case RealMetric::Circular: return real_max_impl<RealMetric::Circular>(a, b, n, dim, stop);
    case RealMetric::Capped: return real_max_impl<RealMetric::Capped>(a, b, n, dim, stop);
  }
  return 0.0;
}

__attribute__((target("avx2"))) inline std::uint32_t first_zero_bit(std::uint32_t eq_mask, std::uint32_t width) {
  std::uint32_t neq = ~eq_mask;
  if (width < 32) neq &= (1u << width) - 1u;
  return neq ? static_cast<std::uint32_t>(__builtin_ctz(neq)) : width;
}

__attribute__((target("avx2"))) void cell_mismatch_avx2(const std::uint8_t* a, const std::uint8_t* b,
                                                        std::size_t ncells, std::size_t cell, std::uint32_t* out) {
  std::size_t j = 0;
  if (cell == 16) {
    // Two cells per 32-byte compare.
    for (; j + 2 <= ncells; j += 2) {
      __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + j * 16));
      __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + j * 16));
      auto eq = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)));
      out[j] = first_zero_bit(eq & 0xFFFFu, 16);
      out[j + 1] = first_zero_bit(eq >> 16, 16);
    }
  }
  for (; j < ncells; ++j) {
    const std::uint8_t* pa = a + j * cell;
    const std::uint8_t* pb = b + j * cell;
    std::size_t t = 0;
    std::uint32_t found = static_cast<std::uint32_t>(cell);
    for (; t + 32 <= cell; t += 32) {
      __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pa + t));
      __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pb + t));
      auto eq = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)));
      if (eq != 0xFFFFFFFFu) {
        found = static_cast<std::uint32_t>(t) + first_zero_bit(eq, 32);
        break;
      }
    }
    if (found == cell && t < cell) {
      for (; t + 16 <= cell; t += 16) {
        __m128i va = _mm_loadu_si128(reinterpret_cast<const __m128i*>(pa + t));
        __m128i vb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(pb + t));
        auto eq = static_cast<std::uint32_t>(_mm_movemask_epi8(_mm_cmpeq_epi8(va, vb)));
        if (eq != 0xFFFFu) {
          found = static_cast<std::uint32_t>(t) + first_zero_bit(eq, 16);
          break;
        }
      }
      if (found == cell)
        for (; t < cell; ++t)
          if (pa[t] != pb[t]) {
            found = static_cast<std::uint32_t>(t);
            break;
          }
    }
    out[j] = found;
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", real_sum_avx2, real_max_avx2, cell_mismatch_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

}  // namespace depthlab::simd
