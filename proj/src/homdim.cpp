#include "depthlab/homdim.hpp"

#include <string>

#include "depthlab/errors.hpp"

namespace depthlab {

namespace {
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw PreconditionError("integer overflow");
  return r;
}
std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw PreconditionError("integer overflow");
  return r;
}
}  // namespace

std::int64_t homogeneous_dimension(const LayerDims& layers) {
  if (layers.empty()) throw PreconditionError("layer dimensions are empty");
  bool positive = false;
  std::int64_t d = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i] < 0) throw PreconditionError("layer dimensions must be nonnegative");
    positive |= layers[i] > 0;
    d = checked_add(d, checked_mul(static_cast<std::int64_t>(i + 1), layers[i]));
  }
  if (!positive) throw PreconditionError("at least one layer must be nonzero");
  return d;
}

LayerDims ut_layers(int n) {
  if (n < 2) throw PreconditionError("UT(n) needs n >= 2");
  LayerDims out;
  for (int i = 1; i < n; ++i) out.push_back(n - i);
  return out;
}

std::int64_t solvable_dimension(const std::vector<std::int64_t>& block_counts) {
  std::int64_t d = 1;
  for (std::size_t i = 0; i < block_counts.size(); ++i) {
    if (block_counts[i] < 0) throw PreconditionError("block counts must be nonnegative");
    auto k = static_cast<std::int64_t>(i + 1);
    d = checked_add(d, checked_mul(k * (k + 1) / 2, block_counts[i]));
  }
  return d;
}

nlohmann::json homdim_report(const std::string& group, const LayerDims& layers) {
  return {{"group", group}, {"layers", layers}, {"dimension", homogeneous_dimension(layers)}};
}

}  // namespace depthlab
