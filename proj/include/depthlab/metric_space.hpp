#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace depthlab {

inline constexpr double kDefaultTolerance = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct Torus {
  int dim = 1;
};

// Distances are min(1, euclidean).
struct EuclideanBounded {
  int dim = 1;
};

// Unit circle written as a torus coordinate in [0,1).
struct Circle {};

// Symbols 1..alphabet are active; 0 is the padding symbol.
struct Subshift {
  int alphabet = 2;
  double theta = 0.5;
};

struct FreeGroup {
  int rank = 2;
  int max_word_len = 64;
};

using Space = std::variant<Interval, Torus, EuclideanBounded, Circle, Subshift, FreeGroup>;

inline constexpr std::uint8_t kPadSymbol = 0;

// Eventually constant sequence: prefix followed by tail repeated forever.
// Kept canonical: the prefix never ends with the tail symbol.
struct SubshiftPoint {
  std::vector<std::uint8_t> prefix;
  std::uint8_t tail = kPadSymbol;
  bool operator==(const SubshiftPoint&) const = default;
};

// Reduced word; letter +i is a_i and -i is its inverse (1-based).
struct FreeWord {
  std::vector<std::int16_t> letters;
  bool operator==(const FreeWord&) const = default;
};

using Point = std::variant<double, std::vector<double>, SubshiftPoint, FreeWord>;

std::string space_kind(const Space& s);
// Throws PreconditionError when parameters break the space invariants.
void validate_space(const Space& s);
int space_dim(const Space& s);  // coordinates per point for real spaces, 0 otherwise
bool is_real_space(const Space& s);

bool is_valid_point(const Space& s, const Point& p);
// Throws SpaceMismatch if p does not belong to s.
void check_point(const Space& s, const Point& p);

double distance(const Space& s, const Point& p, const Point& q);
bool approx_equal(const Space& s, const Point& p, const Point& q, double tol = kDefaultTolerance);

double wrap_unit(double x);
double circular_delta(double a, double b);

SubshiftPoint make_subshift_point(std::vector<std::uint8_t> prefix, std::uint8_t tail);
SubshiftPoint normalize(SubshiftPoint p);
std::uint8_t subshift_symbol(const SubshiftPoint& p, std::size_t i);

FreeWord free_reduce(const std::vector<std::int16_t>& letters);
// Reduced product a*b; throws WordOverflow past max_len.
FreeWord free_multiply(const FreeWord& a, const FreeWord& b, int max_len);
FreeWord free_inverse(const FreeWord& a);

std::string point_to_string(const Point& p);

nlohmann::json space_to_json(const Space& s);
Space space_from_json(const nlohmann::json& j);

}  // namespace depthlab
