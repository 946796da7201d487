#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "depthlab/metric_space.hpp"

namespace depthlab {

struct Identity {};

// Angle in turns.
struct Rotation {
  double angle = 0.0;
};

struct IfsAffine {
  double slope = 1.0;
  double offset = 0.0;
};

struct Translation {
  std::vector<double> vector;
};

// (x, y) -> (x, x + y) on Torus(2).
struct Shear {};

enum class HeisenbergAxis { T1, T2, T3 };

// T1: x += a.  T2: y += a, z += x.  T3: z += a.  sign = -1 gives the inverse.
struct HeisenbergGen {
  HeisenbergAxis which = HeisenbergAxis::T1;
  double alpha = 0.41421356237309503;
  int sign = 1;
};

struct PingPongPL {
  int index = 0;
  double eta = 0.05;
};

// Shift on the cylinder [symbol], constant symbol sequence elsewhere.
struct SubshiftChamber {
  std::uint8_t symbol = 1;
};

// Left multiplication by a letter (+i or -i).
struct FreeLeftMul {
  int gen = 1;
};

// x -> x / max(1, |x|).
struct Reset {};

// Radial profile: lambda * x inside `inner`, identity beyond `outer`, and the
// radius interpolated linearly in between.
struct Expand {
  double lambda = 2.0;
  double inner = 0.5;
  double outer = 1.0;
};

// x -> x + u(x_0), with u piecewise linear in the first coordinate and clamped
// outside the knots.
struct Writer {
  std::string id;
  std::vector<double> knots;
  std::vector<std::vector<double>> values;
};

using TransitionMap = std::variant<Identity, Rotation, IfsAffine, Translation, Shear, HeisenbergGen, PingPongPL,
                                   SubshiftChamber, FreeLeftMul, Reset, Expand, Writer>;

// Generator indices; word[0] is the outermost map, so the last letter is
// applied first.
using Word = std::vector<std::uint16_t>;

struct Family {
  std::string name;
  Space space;
  std::vector<TransitionMap> generators;
};

std::string map_kind(const TransitionMap& m);
// Throws PreconditionError if `m` is not defined on `s` or its parameters are out of range.
void validate_map(const Space& s, const TransitionMap& m);
void validate_family(const Family& f);

Point apply(const Space& s, const TransitionMap& m, const Point& p);
// In-place form for real spaces; `v` holds space_dim(s) coordinates.
void apply_real_inplace(const Space& s, const TransitionMap& m, double* v);
Point apply_word(const Family& f, const Word& w, const Point& p);

// Max over pairs of d(f x, f y) / d(x, y).  Throws PreconditionError on an
// empty sample or a coincident pair.
double empirical_lipschitz(const Space& s, const TransitionMap& m, const std::vector<std::pair<Point, Point>>& pairs);

// Value of a ping-pong generator at x, used by apply and by the exact
// piecewise-linear representation.
double pingpong_value(const PingPongPL& m, double x);
std::vector<std::pair<double, double>> pingpong_knots(const PingPongPL& m);

nlohmann::json map_to_json(const TransitionMap& m);
TransitionMap map_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const Family& f);
Family family_from_json(const nlohmann::json& j);

std::vector<std::string> family_preset_names();
// Throws ConfigError for an unknown name.
Family family_preset(const std::string& name);

}  // namespace depthlab
