#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "depthlab/entropy.hpp"
#include "depthlab/word_ball.hpp"

namespace depthlab {

// Which representatives a depth-k cell covers: the ball B(k) or the words of length exactly k.
enum class WordSet { Ball, Sphere };
std::string word_set_name(WordSet w);
WordSet word_set_from_name(const std::string& s);

struct GrowthCell {
  int k = 0;
  double epsilon = 0.0;
  CoveringBracket bracket;
  bool cap_exceeded = false;
};

struct GrowthProfile {
  std::string family;
  std::string strategy;
  MetricTag metric = MetricTag::dS;
  std::string probes;
  std::vector<GrowthCell> cells;  // ordered by k, then epsilon as given

  std::vector<GrowthCell> at_epsilon(double eps) const;
};

struct GrowthRequest {
  Family family;
  std::vector<int> ks;
  std::vector<double> epsilons;
  ProbeSpec probes;
  Strategy strategy = WordEnum{};
  MetricTag metric = MetricTag::dS;
  WordSet words = WordSet::Ball;
  std::size_t cap = kDefaultCap;
  int threads = 1;
};

GrowthProfile growth_profile(const GrowthRequest& req);

std::string format_double(double x);
// Two provenance comment lines, the header, then one line per cell.
std::string profile_csv(const GrowthProfile& p, const std::string& config_hash);
GrowthProfile profile_from_csv(const std::string& text);

struct GrowthClass {
  enum class Kind { Saturate, Polynomial, Exponential, SuperExponential };
  Kind kind = Kind::Saturate;
  int plateau_k = 0;
  double degree = 0.0;
  double rate = 0.0;
  double r2 = 0.0;
  int evidence_depth = -1;  // cap-exceeded depth, -1 when the verdict came from convexity
};

std::string growth_kind_name(GrowthClass::Kind k);
GrowthClass classify_growth(const GrowthProfile& p, double eps);
nlohmann::json growth_class_to_json(const GrowthClass& g);

// `steps` geometric values from diam / 2^8 to diam.
std::vector<double> default_epsilon_grid(double diam, int steps = 24);

// (12 L / sqrt n) times the trapezoid integral of sqrt(log N(eps)) from 0 to
// the last grid value, taking N(0) = reps and N(eps_j) = upper[j].
double dudley_integral(const std::vector<double>& eps, const std::vector<std::size_t>& upper, std::size_t reps,
                       double lipschitz, std::size_t n);
// Largest pairwise d_S among `rows`.
double d_S_diameter(const EvalMatrix& m, const std::vector<std::size_t>& rows);
// Dudley term for a finite set of rows under d_S on the default grid.
double dudley_for_rows(const EvalMatrix& m, const std::vector<std::size_t>& rows, double lipschitz, std::size_t n);

}  // namespace depthlab
