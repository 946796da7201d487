#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "depthlab/eval_matrix.hpp"

namespace depthlab {

// lower = |greedy packing at 2*eps|, upper = |greedy packing at eps|.
// exact is the minimum number of closed eps-balls centred at the rows that
// cover them, filled in when there are at most kExactLimit rows.
struct CoveringBracket {
  double epsilon = 0.0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  std::optional<std::size_t> exact;
};

inline constexpr std::size_t kExactLimit = 20;

// Farthest-point greedy over `rows` (all rows when null): seeds with the
// first row, repeatedly takes the row farthest from the selection (lowest
// index on ties) while that distance exceeds eps.  Returns matrix row indices
// in selection order; they are pairwise more than eps apart and every row is
// within eps of one of them.
std::vector<std::size_t> greedy_packing(const EvalMatrix& m, MetricTag tag, double eps,
                                        const std::vector<std::size_t>* rows = nullptr);
CoveringBracket covering_bracket(const EvalMatrix& m, MetricTag tag, double eps,
                                 const std::vector<std::size_t>* rows = nullptr, bool with_exact = true);
std::optional<std::size_t> exact_covering_number(const EvalMatrix& m, MetricTag tag, double eps,
                                                 const std::vector<std::size_t>* rows = nullptr);

// Same operations on an explicit symmetric distance matrix.
using DistanceMatrix = std::vector<std::vector<double>>;
std::vector<std::size_t> greedy_packing(const DistanceMatrix& d, double eps);
std::size_t exact_covering_number(const DistanceMatrix& d, double eps);
CoveringBracket covering_bracket(const DistanceMatrix& d, double eps);

// Largest subset with pairwise distances above eps, by exhaustive search (at most kExactLimit points).
std::size_t exact_packing_number(const DistanceMatrix& d, double eps);

// Product over j = 1..k of the lower bracket of the writer rows at eps / lambda^(k-j+1).
std::size_t e3_multiplicative_bound(const EvalMatrix& writers, MetricTag tag, double lambda, int k, double eps);

}  // namespace depthlab
