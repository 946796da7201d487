#include <doctest.h>

#include <cmath>
#include <random>

#include "depthlab/entropy.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/growth.hpp"

using namespace depthlab;

namespace {

DistanceMatrix line_distances(const std::vector<double>& xs) {
  DistanceMatrix d(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) d[i][j] = std::fabs(xs[i] - xs[j]);
  return d;
}

DistanceMatrix random_cloud(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  DistanceMatrix d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  return d;
}

// Smallest number of closed eps-balls centred at points that covers all points.
std::size_t brute_cover(const DistanceMatrix& d, double eps) {
  const std::size_t n = d.size();
  std::size_t best = n;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      bool hit = false;
      for (std::size_t c = 0; c < n && !hit; ++c) hit = (mask >> c & 1u) && d[c][i] <= eps;
      ok = hit;
    }
    if (ok) best = size;
  }
  return best;
}

DistanceMatrix restrict(const DistanceMatrix& d, const std::vector<std::size_t>& idx) {
  DistanceMatrix r(idx.size(), std::vector<double>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) r[i][j] = d[idx[i]][idx[j]];
  return r;
}

struct Affine {
  double a, b;
  double operator()(double x) const { return a * x + b; }
};

// Sup distance on [0, 1] between affine maps is attained at an endpoint.
DistanceMatrix affine_distances(const std::vector<Affine>& fs) {
  DistanceMatrix d(fs.size(), std::vector<double>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < fs.size(); ++j)
      d[i][j] = std::max(std::fabs(fs[i](0.0) - fs[j](0.0)), std::fabs(fs[i](1.0) - fs[j](1.0)));
  return d;
}

EvalMatrix constant_rows(const std::vector<std::vector<double>>& pts) {
  EvalMatrix m(EuclideanBounded{2}, 1);
  for (const auto& p : pts) m.append_points({Point{p}});
  return m;
}

ExperimentConfig small_config(const std::string& preset, int k_to, std::vector<double> eps) {
  auto c = preset_config(preset);
  c.k_from = 1;
  c.k_to = k_to;
  c.epsilons = std::move(eps);
  return c;
}

}  // namespace

TEST_CASE("greedy packing examples") {
  auto d = line_distances({0.0, 0.1, 0.2, 0.3, 0.4});
  auto sel = greedy_packing(d, 0.15);
  CHECK(sel == std::vector<std::size_t>{0, 4, 2});
  CHECK(exact_packing_number(d, 0.15) == 3);
  CHECK(greedy_packing(line_distances({0.7}), 0.01) == std::vector<std::size_t>{0});
  auto single = covering_bracket(line_distances({0.7}), 0.3);
  CHECK(single.lower == 1);
  CHECK(single.upper == 1);
  CHECK(single.exact == 1u);
}

TEST_CASE("greedy output is a packing and a cover") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    auto d = random_cloud(rng, 1 + rng() % 40);
    double eps = 0.05 + 0.3 * static_cast<double>(rng() % 1000) / 1000.0;
    auto sel = greedy_packing(d, eps);
    REQUIRE(!sel.empty());
    CHECK(sel.front() == 0);
    for (std::size_t i = 0; i < sel.size(); ++i)
      for (std::size_t j = i + 1; j < sel.size(); ++j) CHECK(d[sel[i]][sel[j]] > eps);
    for (std::size_t p = 0; p < d.size(); ++p) {
      double best = 1e9;
      for (auto s : sel) best = std::min(best, d[s][p]);
      CHECK(best <= eps);
    }
  }
}

TEST_CASE("bracket contains the brute-force covering number") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    auto d = random_cloud(rng, 1 + rng() % 12);
    const double eps = t % 2 ? 0.3 : 0.1 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
    auto b = covering_bracket(d, eps);
    std::size_t oracle = brute_cover(d, eps);
    REQUIRE(b.exact.has_value());
    CHECK(*b.exact == oracle);
    CHECK(exact_covering_number(d, eps) == oracle);
    CHECK(b.lower <= oracle);
    CHECK(oracle <= b.upper);
    CHECK(b.upper >= 1);
  }
}

TEST_CASE("matrix and distance-matrix paths agree") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EvalMatrix m(Interval{0.0, 1.0}, 9);
  for (int r = 0; r < 15; ++r) {
    std::vector<Point> row;
    for (int i = 0; i < 9; ++i) row.push_back(u(rng));
    m.append_points(row);
  }
  for (MetricTag tag : {MetricTag::dS, MetricTag::dPmax}) {
    DistanceMatrix d(15, std::vector<double>(15));
    for (std::size_t i = 0; i < 15; ++i)
      for (std::size_t j = 0; j < 15; ++j) d[i][j] = row_distance(m, tag, i, j);
    for (double eps : {0.05, 0.2, 0.35}) {
      CHECK(greedy_packing(m, tag, eps) == greedy_packing(d, eps));
      auto bm = covering_bracket(m, tag, eps);
      auto bd = covering_bracket(d, eps);
      CHECK(bm.lower == bd.lower);
      CHECK(bm.upper == bd.upper);
      CHECK(bm.exact == bd.exact);
    }
  }
}

TEST_CASE("sub-additivity over random splits") {
  std::mt19937_64 rng(5);
  std::size_t greedy_violations = 0;
  for (int t = 0; t < 200; ++t) {
    auto d = random_cloud(rng, 2 + rng() % 18);
    const double eps = 0.1 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
    std::vector<std::size_t> left, right, all;
    for (std::size_t i = 0; i < d.size(); ++i) {
      (rng() % 2 ? left : right).push_back(i);
      all.push_back(i);
    }
    if (left.empty() || right.empty()) continue;
    auto dl = restrict(d, left), dr = restrict(d, right);
    if (greedy_packing(d, eps).size() > greedy_packing(dl, eps).size() + greedy_packing(dr, eps).size()) {
      ++greedy_violations;
      CHECK(exact_covering_number(d, eps) <= exact_covering_number(dl, eps) + exact_covering_number(dr, eps));
    }
    CHECK(brute_cover(d, eps) <= brute_cover(dl, eps) + brute_cover(dr, eps));
  }
  MESSAGE("greedy sub-additivity violations: " << greedy_violations);
}

TEST_CASE("composition lemma on affine interval maps") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const double lip = 0.5 + u(rng);
    std::vector<Affine> fs(2 + rng() % 4), gs(2 + rng() % 4);
    for (auto& f : fs) {
      double a = u(rng) * 2.0 - 1.0;
      f = {a, std::fabs(a) < 1.0 ? u(rng) * (1.0 - std::fabs(a)) + std::max(0.0, -a) : 0.5};
    }
    for (auto& g : gs) g = {lip * (u(rng) * 2.0 - 1.0), u(rng)};
    std::vector<Affine> comp;
    for (const auto& g : gs)
      for (const auto& f : fs) comp.push_back({g.a * f.a, g.a * f.b + g.b});
    if (comp.size() > kExactLimit) continue;
    const double eg = 0.05 + 0.2 * u(rng), ef = 0.05 + 0.2 * u(rng);
    // Every |g.a| <= lip, so the composite class covers at eg + lip * ef.
    std::size_t lhs = exact_covering_number(affine_distances(comp), eg + lip * ef);
    std::size_t rhs = exact_covering_number(affine_distances(gs), eg) * exact_covering_number(affine_distances(fs), ef);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("multiplicative writer bound") {
  const double h = 0.5 * std::sqrt(3.0) / 2.0;
  auto three = constant_rows({{0.0, 0.0}, {0.5, 0.0}, {0.25, h}});
  CHECK(e3_multiplicative_bound(three, MetricTag::dS, 2.0, 2, 0.2) == 9);
  CHECK(e3_multiplicative_bound(three, MetricTag::dS, 2.0, 0, 0.2) == 1);
  auto one = constant_rows({{0.1, 0.1}});
  for (int k = 0; k <= 4; ++k) CHECK(e3_multiplicative_bound(one, MetricTag::dS, 2.0, k, 0.2) == 1);
}

TEST_CASE("e3 construction meets the bound directly") {
  auto f = family_preset("e3");
  auto probes = random_probes(f.space, 64, 13);
  for (int k = 1; k <= 2; ++k) {
    auto r = run_e3(f, k, 0.2, probes, MetricTag::dS);
    CHECK(r.direct >= r.bound);
    CHECK(r.words >= r.bound);
  }
}

TEST_CASE("dudley integral quadrature") {
  std::vector<double> eps = {0.1, 0.2, 0.4};
  std::vector<std::size_t> upper = {5, 3, 1};
  const std::size_t reps = 8;
  // Trapezoid from 0 with N(0) = reps.
  double f0 = std::sqrt(std::log(8.0)), f1 = std::sqrt(std::log(5.0)), f2 = std::sqrt(std::log(3.0)), f3 = 0.0;
  double trap = 0.1 * (f0 + f1) / 2 + 0.1 * (f1 + f2) / 2 + 0.2 * (f2 + f3) / 2;
  CHECK(dudley_integral(eps, upper, reps, 2.0, 9) == doctest::Approx(24.0 / 3.0 * trap).epsilon(1e-14));
  CHECK(dudley_integral(eps, upper, reps, 2.0, 36) == doctest::Approx(dudley_integral(eps, upper, reps, 2.0, 9) / 2.0));
  CHECK(dudley_integral(eps, {1, 1, 1}, 1, 1.0, 100) == 0.0);

  auto grid = default_epsilon_grid(0.8);
  REQUIRE(grid.size() == 24);
  CHECK(grid.front() == doctest::Approx(0.8 / 256.0));
  CHECK(grid.back() == 0.8);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("shear dudley value is frozen against the quadrature oracle") {
  auto f = family_preset("shear");
  auto probes = lattice_probes(f.space, 32);
  auto b = enumerate(f, 10, CanonicalBFS{});
  auto m = evaluate(f, b, probes);
  auto rows = b.ball_rows(10);
  REQUIRE(rows.size() == 11);
  CHECK(d_S_diameter(m, rows) == doctest::Approx(0.28853414550967793).epsilon(1e-12));
  CHECK(dudley_for_rows(m, rows, 1.0, 100) == doctest::Approx(0.478727550415206).epsilon(1e-9));
  CHECK(dudley_for_rows(m, {rows.front()}, 1.0, 100) == 0.0);
}

TEST_CASE("shear ball below the separation scale is fully resolved") {
  auto f = family_preset("shear");
  auto probes = lattice_probes(f.space, 32);
  auto b = enumerate(f, 10, CanonicalBFS{});
  auto m = evaluate(f, b, probes);
  double dmin = 1e9;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.rows(); ++j) dmin = std::min(dmin, d_S(m, i, j));
  CHECK(dmin >= 0.2);
  CHECK(greedy_packing(m, MetricTag::dS, 0.49 * dmin).size() == 11);
}

TEST_CASE("ping-pong ball separates 2^k words on extremal probes") {
  auto c = small_config("pingpong-pl", 6, {0.1});
  auto run = run_growth(c);
  REQUIRE(run.profile.cells.size() == 6);
  CHECK(run.profile.cells.back().bracket.lower >= 64);
}

TEST_CASE("profile monotonicity and classification") {
  SUBCASE("cantor saturates from the predicted depth") {
    auto run = run_growth(small_config("cantor", 10, {0.2, 0.1}));
    auto cells = run.profile.at_epsilon(0.2);
    REQUIRE(cells.size() == 10);
    for (std::size_t i = 2; i < cells.size(); ++i) CHECK(cells[i].bracket.upper == cells[2].bracket.upper);
    auto g = classify_growth(run.profile, 0.2);
    CHECK(g.kind == GrowthClass::Kind::Saturate);
    auto fine = run.profile.at_epsilon(0.1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      CHECK(fine[i].bracket.upper >= cells[i].bracket.upper);
      if (i > 0) CHECK(cells[i].bracket.upper >= cells[i - 1].bracket.upper);
    }
  }
  SUBCASE("shear grows linearly") {
    auto c = small_config("shear", 20, {0.1});
    auto run = run_growth(c);
    auto g = classify_growth(run.profile, 0.1);
    CHECK(g.kind == GrowthClass::Kind::Polynomial);
    CHECK(g.degree == doctest::Approx(1.0).epsilon(0.1));
    CHECK(g.r2 >= 0.0);
    CHECK(g.r2 <= 1.0);
  }
  SUBCASE("subshift grows exponentially") {
    auto run = run_growth(small_config("subshift", 8, {0.4}));
    for (const auto& cell : run.profile.cells) CHECK(cell.bracket.lower >= (std::size_t{1} << cell.k));
    auto g = classify_growth(run.profile, 0.4);
    CHECK(g.kind == GrowthClass::Kind::Exponential);
    CHECK(g.rate == doctest::Approx(2.0).epsilon(0.1));
  }
  SUBCASE("too few depths") {
    auto run = run_growth(small_config("shear", 4, {0.1}));
    CHECK_THROWS_AS(classify_growth(run.profile, 0.1), InsufficientData);
  }
}

TEST_CASE("profile csv round trip") {
  auto c = small_config("cantor", 5, {0.2, 0.05});
  auto run = run_growth(c);
  auto back = profile_from_csv(run.csv);
  CHECK(back.cells.size() == run.profile.cells.size());
  CHECK(profile_csv(back, config_hash(c)) == run.csv);
}
