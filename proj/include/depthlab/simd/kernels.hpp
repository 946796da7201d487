#pragma once

#include <cstddef>
#include <cstdint>

namespace depthlab::simd {

enum class RealMetric : std::uint8_t {
  Euclid,    // plain euclidean per probe
  Circular,  // per-coordinate min(|d|, 1-|d|), coordinates already in [0,1)
  Capped,    // min(1, euclidean) per probe
};

// Rows are `dim` blocks of `n` probe values (coordinate-major).  Both kernels
// work on squared per-probe distances.  The sum keeps four lanes (lane = probe
// index mod 4) combined as (l0 + l1) + (l2 + l3); every implementation follows
// that order, so results are bit-identical across ISAs.
//
// real_sum returns early with the partial sum once it exceeds `stop`;
// real_max returns early once the running max reaches `stop`.
using RealSumFn = double (*)(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim,
                             double stop);
using RealMaxFn = double (*)(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim,
                             double stop);
// out[j] = index of the first differing byte in cell j, or `cell` if equal.
using CellMismatchFn = void (*)(const std::uint8_t* a, const std::uint8_t* b, std::size_t ncells, std::size_t cell,
                                std::uint32_t* out);

struct KernelTable {
  const char* name;
  RealSumFn real_sum;
  RealMaxFn real_max;
  CellMismatchFn cell_mismatch;
};

inline constexpr std::size_t kEarlyExitBlock = 64;

enum class Isa { Scalar, Avx2, Neon };

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Best available table unless overridden by set_isa() or DEPTHLAB_ISA=scalar.
const KernelTable& active_kernels();
// Returns false (and leaves the selection alone) if `isa` is unavailable.
bool set_isa(Isa isa);
Isa active_isa();

}  // namespace depthlab::simd
