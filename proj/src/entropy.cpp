#include "depthlab/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "depthlab/errors.hpp"
#include "simd/kernels_internal.hpp"

namespace depthlab {

namespace {

struct HeapEntry {
  double mind;
  std::size_t pos;
  std::size_t slot;
  bool operator<(const HeapEntry& o) const {
    if (mind != o.mind) return mind < o.mind;
    return pos > o.pos;
  }
};

// Uniform grid over the coordinates of low-dimensional real rows, used to
// find the rows a new centre can get closer to.  Rows are addressed by slot
// in a contiguous coordinate copy.
class GridIndex {
 public:
  GridIndex(const EvalMatrix& m, MetricTag tag, const double* coords, std::size_t slots)
      : coords_(coords), slots_(slots), dims_(m.real_stride()),
        circular_(m.real_metric() == simd::RealMetric::Circular),
        capped_(m.real_metric() == simd::RealMetric::Capped) {
    scale_ = tag == MetricTag::dS ? std::sqrt(static_cast<double>(m.probes())) : 1.0;
  }

  static bool usable(const EvalMatrix& m) { return m.is_real() && m.real_stride() <= 4; }

  // Coordinate half-width of the box containing every row closer than r.
  double bound(double r) const {
    if (!std::isfinite(r)) return r;
    // A capped per-probe distance below b <= 1 equals the uncapped one.
    double b = scale_ * r;
    if (capped_ && b > 1.0) return std::numeric_limits<double>::infinity();
    return b;
  }

  void rebuild(double h, const std::vector<double>& mind, double eps) {
    h_ = h;
    std::vector<std::size_t> live;
    for (std::size_t s = 0; s < slots_; ++s)
      if (mind[s] > eps) live.push_back(s);
    // Dense cell array over the bounding box, coarsened until it holds at
    // most a few cells per live row.
    const double limit = std::max<double>(1024.0, 4.0 * static_cast<double>(live.size()));
    std::vector<double> lo(dims_, 0.0), hi(dims_, 0.0);
    for (std::size_t a = 0; a < dims_; ++a) {
      lo[a] = std::numeric_limits<double>::infinity();
      hi[a] = -lo[a];
      for (std::size_t s : live) {
        lo[a] = std::min(lo[a], coords_[s * dims_ + a]);
        hi[a] = std::max(hi[a], coords_[s * dims_ + a]);
      }
    }
    for (double cell = h;; cell *= 2.0) {
      double total = 1.0;
      axis_h_.assign(dims_, cell);
      axis_k_.assign(dims_, 1);
      axis_o_.assign(dims_, 0);
      for (std::size_t a = 0; a < dims_; ++a) {
        if (circular_) {
          axis_k_[a] = std::max(1LL, static_cast<long long>(std::floor(1.0 / cell)));
          axis_h_[a] = 1.0 / static_cast<double>(axis_k_[a]);
        } else if (!live.empty()) {
          axis_o_[a] = static_cast<long long>(std::floor(lo[a] / cell));
          axis_k_[a] = static_cast<long long>(std::floor(hi[a] / cell)) - axis_o_[a] + 1;
        }
        total *= static_cast<double>(axis_k_[a]);
      }
      if (total <= limit) break;
    }
    std::size_t cells = 1;
    for (std::size_t a = 0; a < dims_; ++a) cells *= static_cast<std::size_t>(axis_k_[a]);
    std::vector<std::size_t> cell_of(live.size());
    start_.assign(cells + 1, 0);
    for (std::size_t i = 0; i < live.size(); ++i) {
      cell_of[i] = cell_index(coords_ + live[i] * dims_);
      ++start_[cell_of[i] + 1];
    }
    occupied_ = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (start_[c + 1] > 0) ++occupied_;
      start_[c + 1] += start_[c];
    }
    items_.assign(live.size(), 0);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < live.size(); ++i) items_[fill[cell_of[i]]++] = live[i];
  }

  double cell_size() const { return h_; }
  bool built() const { return h_ > 0.0; }

  // Calls f(slot) for candidates; returns false if a full scan is cheaper.
  template <class F>
  bool query(std::size_t centre, double b, F&& f) const {
    const double* x = coords_ + centre * dims_;
    long long lo[4], count[4];
    double total = 1.0;
    for (std::size_t a = 0; a < dims_; ++a) {
      long long l = static_cast<long long>(std::floor((x[a] - b) / axis_h_[a]));
      long long u = static_cast<long long>(std::floor((x[a] + b) / axis_h_[a]));
      if (circular_) {
        if (u - l + 1 >= axis_k_[a]) {
          l = 0;
          u = axis_k_[a] - 1;
        }
      } else {
        l = std::max(l - axis_o_[a], 0LL);
        u = std::min(u - axis_o_[a], axis_k_[a] - 1);
        if (u < l) return true;
      }
      lo[a] = l;
      count[a] = u - l + 1;
      total *= static_cast<double>(count[a]);
    }
    if (total > static_cast<double>(occupied_)) return false;
    long long idx[4] = {0, 0, 0, 0};
    for (;;) {
      std::size_t cell = 0;
      for (std::size_t a = dims_; a-- > 0;) {
        long long c = lo[a] + idx[a];
        if (circular_) c = ((c % axis_k_[a]) + axis_k_[a]) % axis_k_[a];
        cell = cell * static_cast<std::size_t>(axis_k_[a]) + static_cast<std::size_t>(c);
      }
      for (std::size_t i = start_[cell]; i < start_[cell + 1]; ++i) f(items_[i]);
      std::size_t a = 0;
      while (a < dims_ && ++idx[a] == count[a]) idx[a++] = 0;
      if (a == dims_) break;
    }
    return true;
  }

 private:
  std::size_t cell_index(const double* x) const {
    std::size_t cell = 0;
    for (std::size_t a = dims_; a-- > 0;) {
      long long c = static_cast<long long>(std::floor(x[a] / axis_h_[a]));
      if (circular_)
        c = ((c % axis_k_[a]) + axis_k_[a]) % axis_k_[a];
      else
        c = std::clamp(c - axis_o_[a], 0LL, axis_k_[a] - 1);
      cell = cell * static_cast<std::size_t>(axis_k_[a]) + static_cast<std::size_t>(c);
    }
    return cell;
  }

  const double* coords_;
  std::size_t slots_;
  std::size_t dims_;
  bool circular_, capped_;
  double scale_ = 1.0;
  double h_ = 0.0;
  std::vector<double> axis_h_;
  std::vector<long long> axis_k_, axis_o_;
  std::vector<std::size_t> start_, items_;
  std::size_t occupied_ = 0;
};

// Positions sorted along a Z-order curve over the row coordinates, so that
// nearby rows sit close together in memory.
std::vector<std::size_t> morton_order(const EvalMatrix& m, const std::vector<std::size_t>& rows) {
  const std::size_t dims = m.real_stride(), N = rows.size();
  std::vector<double> lo(dims, std::numeric_limits<double>::infinity()), hi(dims, -lo[0]);
  for (std::size_t r : rows)
    for (std::size_t a = 0; a < dims; ++a) {
      lo[a] = std::min(lo[a], m.real_row(r)[a]);
      hi[a] = std::max(hi[a], m.real_row(r)[a]);
    }
  const unsigned bits = static_cast<unsigned>(64 / dims > 16 ? 16 : 64 / dims);
  const double top = static_cast<double>((1u << bits) - 1u);
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(N);
  for (std::size_t j = 0; j < N; ++j) {
    std::uint64_t key = 0;
    const double* x = m.real_row(rows[j]);
    for (std::size_t a = 0; a < dims; ++a) {
      double span = hi[a] - lo[a];
      auto q = static_cast<std::uint64_t>(span > 0.0 ? std::clamp((x[a] - lo[a]) / span * top, 0.0, top) : 0.0);
      for (unsigned b = 0; b < bits; ++b) key |= ((q >> b) & 1u) << (b * dims + a);
    }
    keyed[j] = {key, j};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order(N);
  for (std::size_t s = 0; s < N; ++s) order[s] = keyed[s].second;
  return order;
}

std::vector<std::size_t> all_rows(const EvalMatrix& m, const std::vector<std::size_t>* rows) {
  if (rows) {
    for (std::size_t r : *rows)
      if (r >= m.rows()) throw PreconditionError("row index out of range");
    return *rows;
  }
  std::vector<std::size_t> out(m.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("epsilon must be positive and finite");
}

// Minimum number of masks whose union is everything.
std::size_t min_set_cover(const std::vector<std::uint32_t>& masks) {
  const std::size_t n = masks.size();
  if (n == 0) return 0;
  const std::uint32_t full = n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1u);
  std::vector<std::uint8_t> seen(std::size_t{1} << n, 0);
  std::vector<std::uint32_t> frontier{0};
  seen[0] = 1;
  for (std::size_t depth = 1; depth <= n; ++depth) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t s : frontier) {
      // Some centre must cover the lowest uncovered point.
      std::uint32_t missing = full & ~s;
      unsigned low = static_cast<unsigned>(__builtin_ctz(missing));
      for (std::size_t c = 0; c < n; ++c) {
        if (!(masks[c] >> low & 1u)) continue;
        std::uint32_t t = s | masks[c];
        if (t == full) return depth;
        if (!seen[t]) {
          seen[t] = 1;
          next.push_back(t);
        }
      }
    }
    frontier = std::move(next);
  }
  return n;
}

}  // namespace

std::vector<std::size_t> greedy_packing(const EvalMatrix& m, MetricTag tag, double eps,
                                        const std::vector<std::size_t>* rows_in) {
  check_eps(eps);
  const std::vector<std::size_t> rows = all_rows(m, rows_in);
  std::vector<std::size_t> out;
  if (rows.empty()) return out;
  const std::size_t N = rows.size();
  const std::size_t n = m.probes();
  const double inf = std::numeric_limits<double>::infinity();

  // Work arrays are indexed by slot; pos[slot] is the position in `rows`,
  // which alone decides ties.
  const bool use_grid = GridIndex::usable(m) && N > 64;
  std::vector<std::size_t> pos;
  if (use_grid) {
    pos = morton_order(m, rows);
  } else {
    pos.resize(N);
    for (std::size_t s = 0; s < N; ++s) pos[s] = s;
  }
  auto row_of = [&](std::size_t s) { return rows[pos[s]]; };

  // Rows of at most four values fit in one kernel block, whose lane
  // reduction is reproduced here on a contiguous copy.
  const bool tiny = m.is_real() && m.real_stride() <= 4;
  const std::size_t stride = tiny ? m.real_stride() : 0;
  std::vector<double> coords(tiny ? N * stride : 0);
  if (tiny)
    for (std::size_t s = 0; s < N; ++s) std::copy_n(m.real_row(row_of(s)), stride, coords.begin() + s * stride);

  std::vector<double> mind(N, inf);
  std::vector<char> chosen(N, 0);
  std::priority_queue<HeapEntry> heap;
  GridIndex grid(m, tag, coords.data(), N);

  // Under d_P_max each row carries two hint columns where it stands out
  // (argmin and argmax for one-dimensional rows, the rarest leading symbols
  // for symbolic rows).  They are checked before the full scan; a hit there
  // already proves the distance is not below the current minimum.
  const bool use_hints = tag == MetricTag::dPmax && (!m.is_real() || m.dim() == 1) && n > 2 * simd::kEarlyExitBlock;
  std::vector<std::array<std::size_t, 2>> hint(use_hints ? N : 0);
  if (use_hints) {
    for (std::size_t j = 0; j < N; ++j) {
      std::size_t lo = 0, hi = 0;
      if (m.is_real()) {
        const double* r = m.real_row(row_of(j));
        for (std::size_t i = 1; i < n; ++i) {
          if (r[i] < r[lo]) lo = i;
          if (r[i] > r[hi]) hi = i;
        }
      } else {
        const std::uint8_t* r = m.sym_row(row_of(j));
        std::array<std::size_t, 256> count{}, first{};
        for (std::size_t i = n; i-- > 0;) {
          ++count[r[i * m.cell()]];
          first[r[i * m.cell()]] = i;
        }
        std::size_t best = 0, second = 0, cb = SIZE_MAX, cs = SIZE_MAX;
        for (std::size_t v = 0; v < 256; ++v) {
          if (count[v] == 0) continue;
          if (count[v] < cb) {
            second = best;
            cs = cb;
            best = v;
            cb = count[v];
          } else if (count[v] < cs) {
            second = v;
            cs = count[v];
          }
        }
        lo = first[best];
        hi = cs == SIZE_MAX ? lo : first[second];
      }
      hint[j] = {lo, hi};
    }
  }
  auto hinted_far = [&](std::size_t c, std::size_t j) {
    const double* ra = m.is_real() ? m.real_row(row_of(c)) : nullptr;
    const double* rb = m.is_real() ? m.real_row(row_of(j)) : nullptr;
    const std::uint8_t* sa = m.is_real() ? nullptr : m.sym_row(row_of(c));
    const std::uint8_t* sb = m.is_real() ? nullptr : m.sym_row(row_of(j));
    for (std::size_t i : {hint[c][0], hint[c][1], hint[j][0], hint[j][1]})
      if (probe_distance(m, ra, sa, rb, sb, i) >= mind[j]) return true;
    return false;
  };

  auto distance = [&](std::size_t a, std::size_t b, double stop) {
    if (!tiny) return row_distance(m, tag, row_of(a), row_of(b), stop);
    const double* ra = coords.data() + a * stride;
    const double* rb = coords.data() + b * stride;
    double lanes[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      double sq = simd::detail::probe_sq(m.real_metric(), ra, rb, n, m.dim(), i);
      lanes[i & 3] = tag == MetricTag::dS ? lanes[i & 3] + sq : std::max(lanes[i & 3], sq);
    }
    if (tag == MetricTag::dS) return std::sqrt(simd::detail::combine(lanes) / static_cast<double>(n));
    return std::sqrt(std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3])));
  };

  auto relax = [&](std::size_t c, std::size_t j) {
    if (chosen[j] || mind[j] <= eps) return;
    if (use_hints && std::isfinite(mind[j]) && hinted_far(c, j)) return;
    double d = distance(c, j, mind[j]);
    if (d < mind[j]) {
      mind[j] = d;
      if (d > eps) heap.push({d, pos[j], j});
    }
  };

  std::size_t c = static_cast<std::size_t>(std::find(pos.begin(), pos.end(), std::size_t{0}) - pos.begin());
  for (;;) {
    out.push_back(row_of(c));
    const double radius = mind[c];
    chosen[c] = 1;
    mind[c] = 0.0;
    bool done = false;
    if (use_grid) {
      double b = grid.bound(radius);
      if (std::isfinite(b) && b > 0.0) {
        if (!grid.built() || b < 0.5 * grid.cell_size()) grid.rebuild(b, mind, eps);
        done = grid.query(c, b, [&](std::size_t j) { relax(c, j); });
      }
    }
    if (!done)
      for (std::size_t j = 0; j < N; ++j) relax(c, j);
    bool found = false;
    while (!heap.empty()) {
      HeapEntry e = heap.top();
      heap.pop();
      if (chosen[e.slot] || e.mind != mind[e.slot]) continue;
      c = e.slot;
      found = true;
      break;
    }
    if (!found) break;
  }
  return out;
}

std::optional<std::size_t> exact_covering_number(const EvalMatrix& m, MetricTag tag, double eps,
                                                 const std::vector<std::size_t>* rows_in) {
  check_eps(eps);
  const std::vector<std::size_t> rows = all_rows(m, rows_in);
  if (rows.size() > kExactLimit) return std::nullopt;
  DistanceMatrix d(rows.size(), std::vector<double>(rows.size(), 0.0));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b) d[a][b] = d[b][a] = row_distance(m, tag, rows[a], rows[b]);
  return exact_covering_number(d, eps);
}

CoveringBracket covering_bracket(const EvalMatrix& m, MetricTag tag, double eps, const std::vector<std::size_t>* rows,
                                 bool with_exact) {
  CoveringBracket b;
  b.epsilon = eps;
  b.lower = greedy_packing(m, tag, 2.0 * eps, rows).size();
  b.upper = greedy_packing(m, tag, eps, rows).size();
  if (with_exact) b.exact = exact_covering_number(m, tag, eps, rows);
  return b;
}

std::vector<std::size_t> greedy_packing(const DistanceMatrix& d, double eps) {
  check_eps(eps);
  const std::size_t N = d.size();
  std::vector<std::size_t> out;
  if (N == 0) return out;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> mind(N, inf);
  std::vector<char> chosen(N, 0);
  std::size_t c = 0;
  for (;;) {
    out.push_back(c);
    chosen[c] = 1;
    for (std::size_t j = 0; j < N; ++j)
      if (!chosen[j]) mind[j] = std::min(mind[j], d[c][j]);
    double best = eps;
    bool found = false;
    for (std::size_t j = 0; j < N; ++j)
      if (!chosen[j] && mind[j] > best) {
        best = mind[j];
        c = j;
        found = true;
      }
    if (!found) break;
  }
  return out;
}

std::size_t exact_covering_number(const DistanceMatrix& d, double eps) {
  if (d.size() > kExactLimit) throw PreconditionError("exact covering is limited to 20 points");
  std::vector<std::uint32_t> masks(d.size(), 0);
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b)
      if (a == b || d[a][b] <= eps) masks[a] |= 1u << b;
  return min_set_cover(masks);
}

CoveringBracket covering_bracket(const DistanceMatrix& d, double eps) {
  CoveringBracket b;
  b.epsilon = eps;
  b.lower = greedy_packing(d, 2.0 * eps).size();
  b.upper = greedy_packing(d, eps).size();
  if (d.size() <= kExactLimit) b.exact = exact_covering_number(d, eps);
  return b;
}

std::size_t exact_packing_number(const DistanceMatrix& d, double eps) {
  const std::size_t n = d.size();
  if (n > kExactLimit) throw PreconditionError("exact packing is limited to 20 points");
  std::vector<std::uint32_t> conflict(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && !(d[a][b] > eps)) conflict[a] |= 1u << b;
  std::size_t best = 0;
  // Branch on the lowest remaining point.
  auto search = [&](auto&& self, std::uint32_t avail, std::size_t size) -> void {
    if (avail == 0) {
      best = std::max(best, size);
      return;
    }
    if (size + static_cast<std::size_t>(__builtin_popcount(avail)) <= best) return;
    unsigned v = static_cast<unsigned>(__builtin_ctz(avail));
    self(self, avail & ~(1u << v) & ~conflict[v], size + 1);
    self(self, avail & ~(1u << v), size);
  };
  search(search, n == 32 ? 0xFFFFFFFFu : ((1u << n) - 1u), 0);
  return best;
}

std::size_t e3_multiplicative_bound(const EvalMatrix& writers, MetricTag tag, double lambda, int k, double eps) {
  if (k < 0) throw PreconditionError("k must be nonnegative");
  if (!(lambda > 1.0)) throw PreconditionError("lambda must exceed 1");
  check_eps(eps);
  if (writers.rows() == 0) throw PreconditionError("writer set is empty");
  std::size_t product = 1;
  for (int j = 1; j <= k; ++j) {
    double scale = eps / std::pow(lambda, k - j + 1);
    std::size_t lower = greedy_packing(writers, tag, 2.0 * scale).size();
    if (product > std::numeric_limits<std::size_t>::max() / lower) throw CapExceeded(product, j);
    product *= lower;
  }
  return product;
}

}  // namespace depthlab
