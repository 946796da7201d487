#include "depthlab/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>

#include "depthlab/errors.hpp"

namespace depthlab {

double PiecewiseLinear::operator()(double t) const {
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  std::size_t hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
  std::size_t lo = hi - 1;
  double dx = x[hi] - x[lo];
  if (dx <= 0.0) return y[hi];
  return y[lo] + (y[hi] - y[lo]) * (t - x[lo]) / dx;
}

std::size_t PiecewiseLinear::argmin() const {
  return static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
}

std::size_t PiecewiseLinear::argmax() const {
  return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}

PiecewiseLinear pl_identity(double lo, double hi) { return PiecewiseLinear{{lo, hi}, {lo, hi}}; }

PiecewiseLinear compose(const PiecewiseLinear& outer, const PiecewiseLinear& inner) {
  std::vector<double> xs;
  xs.reserve(inner.x.size() * 2);
  for (std::size_t s = 0; s + 1 < inner.x.size(); ++s) {
    const double x0 = inner.x[s], x1 = inner.x[s + 1];
    const double y0 = inner.y[s], y1 = inner.y[s + 1];
    xs.push_back(x0);
    if (y0 == y1) continue;
    const double lo = std::min(y0, y1), hi = std::max(y0, y1);
    auto first = std::upper_bound(outer.x.begin(), outer.x.end(), lo);
    auto last = std::lower_bound(outer.x.begin(), outer.x.end(), hi);
    std::vector<double> cut;
    for (auto it = first; it < last; ++it) cut.push_back(x0 + (*it - y0) * (x1 - x0) / (y1 - y0));
    if (y1 < y0) std::reverse(cut.begin(), cut.end());
    for (double c : cut)
      if (c > xs.back() && c < x1) xs.push_back(c);
  }
  xs.push_back(inner.x.back());

  PiecewiseLinear out;
  out.x.reserve(xs.size());
  out.y.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = outer(inner(xs[i]));
    // Drop a knot when it lies on the segment through its neighbours.
    if (out.x.size() >= 2 && i + 1 <= xs.size()) {
      std::size_t n = out.x.size();
      double xa = out.x[n - 2], ya = out.y[n - 2], xb = out.x[n - 1], yb = out.y[n - 1];
      double lhs = (yb - ya) * (xs[i] - xb), rhs = (v - yb) * (xb - xa);
      double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
      if (std::fabs(lhs - rhs) <= 1e-13 * scale || (ya == yb && yb == v)) {
        out.x.back() = xs[i];
        out.y.back() = v;
        continue;
      }
    }
    out.x.push_back(xs[i]);
    out.y.push_back(v);
  }
  return out;
}

std::optional<PiecewiseLinear> to_piecewise_linear(const Space& s, const TransitionMap& m) {
  if (!std::holds_alternative<Interval>(s)) return std::nullopt;
  const auto& iv = std::get<Interval>(s);
  if (std::holds_alternative<Identity>(m)) return pl_identity(iv.lo, iv.hi);
  if (const auto* a = std::get_if<IfsAffine>(&m)) {
    return PiecewiseLinear{{iv.lo, iv.hi}, {a->slope * iv.lo + a->offset, a->slope * iv.hi + a->offset}};
  }
  if (const auto* p = std::get_if<PingPongPL>(&m)) {
    PiecewiseLinear out;
    for (auto [x, y] : pingpong_knots(*p)) {
      out.x.push_back(x);
      out.y.push_back(y);
    }
    return out;
  }
  return std::nullopt;
}

double sup_distance(const PiecewiseLinear& a, const PiecewiseLinear& b) {
  std::vector<double> xs;
  xs.reserve(a.x.size() + b.x.size());
  std::merge(a.x.begin(), a.x.end(), b.x.begin(), b.x.end(), std::back_inserter(xs));
  double best = 0.0;
  for (double t : xs) best = std::max(best, std::fabs(a(t) - b(t)));
  return best;
}

}  // namespace depthlab
