#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "depthlab/eval_matrix.hpp"
#include "depthlab/transition_maps.hpp"

namespace depthlab {

struct ProbeSet {
  Space space;
  std::vector<Point> points;
  std::string tag;
};

// Probe construction request.  kind is one of: default, grid, lattice,
// random, tail_padded, basepoint, extremal.  depth < 0 means "the depth being
// measured" for the depth-dependent kinds.
struct ProbeSpec {
  std::string kind = "default";
  int n = 0;
  std::uint64_t seed = 0;
  int depth = -1;
};

ProbeSet grid_probes(const Space& s, int n);
// Cell-centred lattice with `per_axis` points per coordinate, capped at 32768 points.
ProbeSet lattice_probes(const Space& s, int per_axis);
ProbeSet random_probes(const Space& s, int n, std::uint64_t seed);
// Every length-k word over the active symbols followed by padding, plus the all-padding point.
ProbeSet tail_padded_probes(const Space& s, int k);
ProbeSet basepoint_probes(const Space& s);
// For interval families with piecewise-linear generators: for each word of
// length k, the first points where the composed map attains its minimum and
// its maximum.
ProbeSet extremal_probes(const Family& f, int k);
ProbeSet default_probes(const Space& s, int depth, std::uint64_t seed);
ProbeSet make_probes(const Family& f, const ProbeSpec& spec, int depth);
bool probes_depend_on_depth(const ProbeSpec& spec, const Space& s);

nlohmann::json probe_spec_to_json(const ProbeSpec& p);
ProbeSpec probe_spec_from_json(const nlohmann::json& j);

struct WordEnum {
  double tau = 1e-9;
};
struct CanonicalBFS {};
using Strategy = std::variant<WordEnum, CanonicalBFS>;

std::string strategy_name(const Strategy& s);

// Exact group element used by the breadth-first strategy.
enum class CanonicalKind { None, Abelian, Heisenberg, Free };
CanonicalKind canonical_kind(const Family& f);

struct WordBall {
  int depth = 0;
  std::string family;
  std::string strategy;
  double tau = 0.0;
  // Breadth-first order: by length, then lexicographic in the witness word.
  std::vector<Word> words;
  // Index of the representative obtained by dropping the first letter; -1 for the identity.
  std::vector<std::int64_t> parent;
  std::vector<std::vector<std::int64_t>> canonical;  // empty for word_enum
  // Depth at which the representative cap was hit, or -1.  Only the partial
  // enumerator sets it; representatives then cover depths below it.
  int cap_exceeded_depth = -1;

  std::size_t size() const { return words.size(); }
  std::size_t count_up_to(int k) const;
  std::vector<std::size_t> layer(int k) const;
  std::vector<std::size_t> ball_rows(int k) const;
};

inline constexpr std::size_t kDefaultCap = 2'000'000;

// Throws CapExceeded once the representative count would pass `cap`.
// Word dedup uses `dedup_probes` (the space default when null).
WordBall enumerate(const Family& f, int k, const Strategy& strategy, std::size_t cap = kDefaultCap,
                   const ProbeSet* dedup_probes = nullptr);
// Same, but stops at the cap and records cap_exceeded_depth instead of throwing.
WordBall enumerate_partial(const Family& f, int k, const Strategy& strategy, std::size_t cap = kDefaultCap,
                           const ProbeSet* dedup_probes = nullptr);

Point apply_canonical(const Family& f, const std::vector<std::int64_t>& element, const Point& p);

// Rows follow `rows` (all representatives when null); row_ids hold representative indices.
EvalMatrix evaluate(const Family& f, const WordBall& ball, const ProbeSet& probes,
                    const std::vector<std::size_t>* rows = nullptr, int threads = 1);

nlohmann::json word_ball_to_json(const WordBall& b);
std::string eval_matrix_csv(const EvalMatrix& m);

}  // namespace depthlab
