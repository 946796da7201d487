#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <set>

#include "depthlab/errors.hpp"
#include "depthlab/word_ball.hpp"

using namespace depthlab;

namespace {

// Ball sizes of the discrete Heisenberg group for the generators x, y, z and
// their inverses, by breadth-first search over unipotent integer matrices
// [[1, a, c], [0, 1, b], [0, 0, 1]].
std::vector<std::size_t> heisenberg_ball_sizes(int kmax) {
  using M = std::array<long long, 3>;  // (a, b, c)
  auto mul = [](const M& g, const M& h) { return M{g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]}; };
  const std::vector<M> gens = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::set<M> seen{{0, 0, 0}};
  std::vector<M> frontier{{0, 0, 0}};
  std::vector<std::size_t> sizes;
  for (int k = 1; k <= kmax; ++k) {
    std::vector<M> next;
    for (const auto& g : frontier)
      for (const auto& s : gens) {
        M h = mul(s, g);
        if (seen.insert(h).second) next.push_back(h);
      }
    frontier = std::move(next);
    sizes.push_back(seen.size());
  }
  return sizes;
}

}  // namespace

TEST_CASE("cantor word ball has 2^(k+1) - 1 distinct maps") {
  auto f = family_preset("cantor");
  auto b = enumerate(f, 8, WordEnum{});
  for (int k = 0; k <= 8; ++k) CHECK(b.count_up_to(k) == (std::size_t{1} << (k + 1)) - 1);
  CHECK(b.layer(3).size() == 8);
  CHECK(b.ball_rows(2).size() == 7);
}

TEST_CASE("breadth-first order and parents") {
  auto f = family_preset("cantor");
  auto b = enumerate(f, 4, WordEnum{});
  REQUIRE(b.words.front().empty());
  CHECK(b.parent.front() == -1);
  for (std::size_t i = 1; i < b.size(); ++i) {
    CHECK(b.words[i - 1].size() <= b.words[i].size());
    if (b.words[i - 1].size() == b.words[i].size()) CHECK(b.words[i - 1] < b.words[i]);
    REQUIRE(b.parent[i] >= 0);
    Word tail(b.words[i].begin() + 1, b.words[i].end());
    CHECK(b.words[static_cast<std::size_t>(b.parent[i])] == tail);
  }
}

TEST_CASE("shear ball has 1 + k elements under both strategies") {
  auto f = family_preset("shear");
  auto c = enumerate(f, 20, CanonicalBFS{});
  auto w = enumerate(f, 20, WordEnum{});
  for (int k = 0; k <= 20; ++k) {
    CHECK(c.count_up_to(k) == static_cast<std::size_t>(k + 1));
    CHECK(w.count_up_to(k) == static_cast<std::size_t>(k + 1));
  }
  CHECK(canonical_kind(f) == CanonicalKind::Abelian);
}

TEST_CASE("heisenberg canonical ball matches brute force") {
  auto f = family_preset("heisenberg");
  CHECK(canonical_kind(f) == CanonicalKind::Heisenberg);
  const int kmax = 8;
  auto oracle = heisenberg_ball_sizes(kmax);
  auto b = enumerate(f, kmax, CanonicalBFS{});
  for (int k = 1; k <= kmax; ++k) CHECK(b.count_up_to(k) == oracle[static_cast<std::size_t>(k - 1)]);
  CHECK(oracle[0] == 7);
  CHECK(oracle[1] == 29);
}

TEST_CASE("free group word enumeration with zero tolerance") {
  auto f = family_preset("free2");
  auto b = enumerate(f, 8, WordEnum{0.0});
  std::size_t sum = 0;
  for (int k = 0; k <= 8; ++k) {
    sum += std::size_t{1} << k;
    CHECK(b.count_up_to(k) == sum);
  }
  auto c = enumerate(f, 8, CanonicalBFS{});
  CHECK(c.size() == b.size());
}

TEST_CASE("representative counts are monotone in k") {
  for (const std::string name : {"cantor", "pingpong-pl", "subshift", "free2"}) {
    auto f = family_preset(name);
    auto b = enumerate(f, 7, WordEnum{});
    for (int k = 1; k <= 7; ++k) CHECK(b.count_up_to(k) >= b.count_up_to(k - 1));
  }
}

TEST_CASE("cap handling") {
  auto f = family_preset("free2");
  CHECK_THROWS_AS(enumerate(f, 10, WordEnum{}, 100), CapExceeded);
  auto p = enumerate_partial(f, 10, WordEnum{}, 100);
  CHECK(p.cap_exceeded_depth >= 0);
  CHECK(p.size() <= 100);
  CHECK(p.count_up_to(p.cap_exceeded_depth - 1) == (std::size_t{1} << p.cap_exceeded_depth) - 1);
}

TEST_CASE("probe set shapes") {
  CHECK(grid_probes(Interval{0.0, 1.0}, 257).points.size() == 257);
  CHECK(lattice_probes(Torus{2}, 32).points.size() == 1024);
  CHECK(lattice_probes(Torus{4}, 32).points.size() <= 32768);
  CHECK(tail_padded_probes(Subshift{2, 0.5}, 5).points.size() == 33);
  auto bp = basepoint_probes(FreeGroup{2, 16});
  REQUIRE(bp.points.size() == 1);
  CHECK(std::get<FreeWord>(bp.points[0]).letters.empty());
  auto r1 = random_probes(EuclideanBounded{3}, 512, 9), r2 = random_probes(EuclideanBounded{3}, 512, 9);
  CHECK(r1.points == r2.points);
  for (const auto& p : r1.points) {
    const auto& v = std::get<std::vector<double>>(p);
    CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0);
  }
  CHECK(default_probes(Interval{0.0, 1.0}, 3, 0).points.size() == 257);
  CHECK_THROWS_AS(lattice_probes(Interval{0.0, 1.0}, 4), PreconditionError);
  CHECK_THROWS_AS(make_probes(family_preset("cantor"), ProbeSpec{"mystery"}, 1), Error);
}

TEST_CASE("extremal probes attain the extremes of each composed word") {
  auto f = family_preset("pingpong-pl");
  const int k = 4;
  auto probes = extremal_probes(f, k);
  auto grid = grid_probes(f.space, 2001);
  auto ball = enumerate(f, k, WordEnum{}, kDefaultCap, &probes);
  for (std::size_t r : ball.layer(k)) {
    double pmin = 2.0, pmax = -1.0, gmin = 2.0, gmax = -1.0;
    for (const auto& p : probes.points) {
      double y = std::get<double>(apply_word(f, ball.words[r], p));
      pmin = std::min(pmin, y);
      pmax = std::max(pmax, y);
    }
    for (const auto& p : grid.points) {
      double y = std::get<double>(apply_word(f, ball.words[r], p));
      gmin = std::min(gmin, y);
      gmax = std::max(gmax, y);
    }
    CHECK(pmin <= gmin + 1e-12);
    CHECK(pmax >= gmax - 1e-12);
  }
}

TEST_CASE("evaluation matches apply_word and is thread independent") {
  for (const std::string name : {"cantor", "shear", "subshift", "free2", "e3"}) {
    CAPTURE(name);
    auto f = family_preset(name);
    ProbeSet probes = name == "e3" ? random_probes(f.space, 8, 3) : default_probes(f.space, 3, 0);
    auto b = enumerate(f, 3, WordEnum{}, kDefaultCap, &probes);
    auto m1 = evaluate(f, b, probes, nullptr, 1);
    auto m3 = evaluate(f, b, probes, nullptr, 3);
    REQUIRE(m1.rows() == b.size());
    for (std::size_t r = 0; r < m1.rows(); ++r)
      for (std::size_t i = 0; i < probes.points.size(); ++i) {
        Point want = apply_word(f, b.words[r], probes.points[i]);
        CHECK(approx_equal(f.space, m1.at(r, i), want, 1e-12));
        CHECK(m1.at(r, i) == m3.at(r, i));
      }
  }
}

TEST_CASE("canonical rows match the word action") {
  auto f = family_preset("heisenberg");
  auto probes = random_probes(f.space, 6, 4);
  auto b = enumerate(f, 4, CanonicalBFS{});
  auto m = evaluate(f, b, probes);
  for (std::size_t r = 0; r < b.size(); r += 7)
    for (std::size_t i = 0; i < probes.points.size(); ++i)
      CHECK(distance(f.space, m.at(r, i), apply_word(f, b.words[r], probes.points[i])) <= 1e-12);
}

TEST_CASE("row pseudo-metrics") {
  std::mt19937_64 rng(8);
  auto f = family_preset("pingpong-pl");
  auto probes = grid_probes(f.space, 65);
  auto b = enumerate(f, 5, WordEnum{});
  auto m = evaluate(f, b, probes);
  for (int t = 0; t < 1000; ++t) {
    std::size_t x = rng() % m.rows(), y = rng() % m.rows(), z = rng() % m.rows();
    for (MetricTag tag : {MetricTag::dS, MetricTag::dPmax}) {
      CHECK(row_distance(m, tag, x, x) == 0.0);
      CHECK(row_distance(m, tag, x, y) == row_distance(m, tag, y, x));
      CHECK(row_distance(m, tag, x, z) <= row_distance(m, tag, x, y) + row_distance(m, tag, y, z) + 1e-12);
    }
    CHECK(d_S(m, x, y) <= d_P_max(m, x, y) + 1e-15);
  }
  // More probes never decrease d_P_max between fixed maps.
  auto wider = grid_probes(f.space, 129);
  auto mw = evaluate(f, b, wider);
  for (std::size_t x = 0; x < m.rows(); x += 3)
    for (std::size_t y = x + 1; y < m.rows(); y += 5) CHECK(d_P_max(mw, x, y) >= d_P_max(m, x, y));
}

TEST_CASE("exports") {
  auto f = family_preset("cantor");
  auto b = enumerate(f, 2, WordEnum{});
  auto j = word_ball_to_json(b);
  CHECK(j["representatives"].size() == 7);
  CHECK(j["strategy"] == "word_enum");
  auto m = evaluate(f, b, grid_probes(f.space, 3));
  auto csv = eval_matrix_csv(m);
  CHECK(csv.rfind("row,probe,point\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 7 * 3);
}
