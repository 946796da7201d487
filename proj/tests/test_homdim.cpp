#include <doctest.h>

#include <limits>

#include "depthlab/errors.hpp"
#include "depthlab/homdim.hpp"

using namespace depthlab;

TEST_CASE("homogeneous dimension examples") {
  CHECK(homogeneous_dimension({3}) == 3);
  CHECK(homogeneous_dimension({2, 1}) == 4);
  CHECK(homogeneous_dimension({4, 1}) == 6);
  CHECK(homogeneous_dimension(ut_layers(3)) == 4);
  CHECK(homogeneous_dimension(ut_layers(4)) == 10);
  CHECK(ut_layers(2) == LayerDims{1});
  CHECK(homogeneous_dimension(ut_layers(2)) == 1);
}

TEST_CASE("unitriangular closed form") {
  for (int n = 2; n <= 200; ++n) {
    const std::int64_t m = n;
    CHECK(homogeneous_dimension(ut_layers(n)) == (m - 1) * m * (m + 1) / 6);
    CHECK(ut_layers(n).size() == static_cast<std::size_t>(n - 1));
  }
}

TEST_CASE("dimension is additive over direct products") {
  const std::vector<LayerDims> gs = {{1}, {2, 1}, {4, 1}, {3, 2, 1}, {0, 0, 1}};
  for (const auto& a : gs)
    for (const auto& b : gs) {
      LayerDims sum(std::max(a.size(), b.size()), 0);
      for (std::size_t i = 0; i < a.size(); ++i) sum[i] += a[i];
      for (std::size_t i = 0; i < b.size(); ++i) sum[i] += b[i];
      CHECK(homogeneous_dimension(sum) == homogeneous_dimension(a) + homogeneous_dimension(b));
    }
}

TEST_CASE("solvable formula") {
  CHECK(solvable_dimension({}) == 1);
  CHECK(solvable_dimension({0, 0}) == 1);
  CHECK(solvable_dimension({3}) == 4);
  CHECK(solvable_dimension({0, 1}) == 4);
  CHECK(solvable_dimension({0, 0, 1}) == 7);
  CHECK(solvable_dimension({2, 1}) == 6);
  CHECK_THROWS_AS(solvable_dimension({-1}), PreconditionError);
}

TEST_CASE("bad inputs and overflow") {
  CHECK_THROWS_AS(homogeneous_dimension({}), PreconditionError);
  CHECK_THROWS_AS(homogeneous_dimension({0, 0}), PreconditionError);
  CHECK_THROWS_AS(homogeneous_dimension({-1, 2}), PreconditionError);
  CHECK_THROWS_AS(ut_layers(1), PreconditionError);
  const auto big = std::numeric_limits<std::int64_t>::max() / 2 + 1;
  CHECK_THROWS_AS(homogeneous_dimension({0, big}), PreconditionError);
  CHECK_THROWS_AS(homogeneous_dimension({big, big}), PreconditionError);
  CHECK_THROWS_AS(solvable_dimension({0, big}), PreconditionError);
}

TEST_CASE("report json") {
  auto j = homdim_report("UT(3)", ut_layers(3));
  CHECK(j["dimension"] == 4);
  CHECK(j["group"] == "UT(3)");
  CHECK(j["layers"] == nlohmann::json::array({2, 1}));
}
