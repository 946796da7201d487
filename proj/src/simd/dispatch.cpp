#include <atomic>
#include <cstdlib>
#include <cstring>

#include "depthlab/simd/kernels.hpp"

namespace depthlab::simd {

#ifndef DEPTHLAB_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#ifndef DEPTHLAB_HAVE_NEON
const KernelTable* neon_kernels() { return nullptr; }
#endif

namespace {

const KernelTable* initial_table() {
  const char* env = std::getenv("DEPTHLAB_ISA");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& selected() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active_kernels() { return *selected().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
  const KernelTable* t = nullptr;
  switch (isa) {
    case Isa::Scalar: t = &scalar_kernels(); break;
    case Isa::Avx2: t = avx2_kernels(); break;
    case Isa::Neon: t = neon_kernels(); break;
  }
  if (!t) return false;
  selected().store(t, std::memory_order_relaxed);
  return true;
}

Isa active_isa() {
  const KernelTable* t = selected().load(std::memory_order_relaxed);
  if (t == avx2_kernels()) return Isa::Avx2;
  if (t == neon_kernels()) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace depthlab::simd
