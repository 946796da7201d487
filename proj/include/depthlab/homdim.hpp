#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace depthlab {

using LayerDims = std::vector<std::int64_t>;

// sum_i i * m_i with overflow checks.
std::int64_t homogeneous_dimension(const LayerDims& layers);
// Layers of the unitriangular group UT(n): (n-1, n-2, ..., 1).
LayerDims ut_layers(int n);
// 1 + sum_k k(k+1)/2 * n_k, counts indexed from k = 1.
std::int64_t solvable_dimension(const std::vector<std::int64_t>& block_counts);

nlohmann::json homdim_report(const std::string& group, const LayerDims& layers);

}  // namespace depthlab
