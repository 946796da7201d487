#pragma once

#include <optional>
#include <vector>

#include "depthlab/transition_maps.hpp"

namespace depthlab {

// Continuous piecewise-linear self-map of an interval, stored as knots.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;

  double operator()(double t) const;
  std::size_t argmin() const;  // first knot attaining the minimum
  std::size_t argmax() const;  // first knot attaining the maximum
};

PiecewiseLinear pl_identity(double lo, double hi);
// outer after inner; knots where inner crosses a knot of outer are inserted and
// collinear knots are dropped.
PiecewiseLinear compose(const PiecewiseLinear& outer, const PiecewiseLinear& inner);

// Exact representation for identity, affine and ping-pong maps on an interval.
std::optional<PiecewiseLinear> to_piecewise_linear(const Space& s, const TransitionMap& m);

// Sup distance between two piecewise-linear maps on the same domain.
double sup_distance(const PiecewiseLinear& a, const PiecewiseLinear& b);

}  // namespace depthlab
