#include <doctest.h>

#include <cmath>
#include <random>

#include "depthlab/errors.hpp"
#include "depthlab/metric_space.hpp"

using namespace depthlab;

namespace {

Point random_point(const Space& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (std::holds_alternative<Interval>(s)) return u(rng);
  if (const auto* t = std::get_if<Torus>(&s)) {
    std::vector<double> x(static_cast<std::size_t>(t->dim));
    for (auto& c : x) c = wrap_unit(u(rng));
    return x;
  }
  if (std::holds_alternative<Circle>(s)) return std::vector<double>{wrap_unit(u(rng))};
  if (const auto* e = std::get_if<EuclideanBounded>(&s)) {
    std::vector<double> x(static_cast<std::size_t>(e->dim));
    for (auto& c : x) c = 2.0 * u(rng) - 1.0;
    return x;
  }
  if (const auto* sub = std::get_if<Subshift>(&s)) {
    std::vector<std::uint8_t> prefix(rng() % 6);
    for (auto& c : prefix) c = static_cast<std::uint8_t>(rng() % static_cast<unsigned>(sub->alphabet + 1));
    return make_subshift_point(prefix, static_cast<std::uint8_t>(rng() % static_cast<unsigned>(sub->alphabet + 1)));
  }
  std::vector<std::int16_t> letters(rng() % 6);
  for (auto& l : letters) l = static_cast<std::int16_t>((rng() % 2 ? 1 : -1) * static_cast<int>(1 + rng() % 2));
  return free_reduce(letters);
}

const std::vector<Space> kSpaces = {Interval{0.0, 1.0}, Torus{3},          EuclideanBounded{2},
                                    Circle{},           Subshift{2, 0.5}, FreeGroup{2, 32}};

}  // namespace

TEST_CASE("distance examples per space") {
  CHECK(distance(Interval{0.0, 1.0}, 0.25, 0.75) == doctest::Approx(0.5));
  CHECK(distance(Circle{}, std::vector<double>{0.1}, std::vector<double>{0.9}) == doctest::Approx(0.2));
  CHECK(distance(Torus{2}, std::vector<double>{0.0, 0.0}, std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(std::sqrt(0.5)));
  CHECK(distance(EuclideanBounded{2}, std::vector<double>{0.0, 0.0}, std::vector<double>{0.3, 0.4}) ==
        doctest::Approx(0.5));
  CHECK(distance(EuclideanBounded{2}, std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 4.0}) == 1.0);

  Subshift sh{2, 0.5};
  auto a = make_subshift_point({1, 2, 1}, 0);
  auto b = make_subshift_point({1, 2, 2}, 0);
  CHECK(distance(sh, a, b) == doctest::Approx(0.25));
  CHECK(distance(sh, a, a) == 0.0);
  // Mismatch in the tail region.
  auto c = make_subshift_point({1}, 0);
  auto d = make_subshift_point({1}, 2);
  CHECK(distance(sh, c, d) == doctest::Approx(0.5));

  FreeGroup fg{2, 16};
  CHECK(distance(fg, FreeWord{{1, 2}}, FreeWord{{1, -2}}) == 2.0);
  CHECK(distance(fg, FreeWord{{1}}, FreeWord{{2}}) == 2.0);
  CHECK(distance(fg, FreeWord{}, FreeWord{{1, 1, 2}}) == 3.0);
}

TEST_CASE("subshift points stay canonical") {
  auto p = make_subshift_point({1, 2, 0, 0}, 0);
  CHECK(p.prefix == std::vector<std::uint8_t>{1, 2});
  CHECK(subshift_symbol(p, 0) == 1);
  CHECK(subshift_symbol(p, 7) == 0);
  CHECK(normalize(SubshiftPoint{{2, 2}, 2}) == SubshiftPoint{{}, 2});
}

TEST_CASE("free group reduction and overflow") {
  CHECK(free_reduce({1, 2, -2, -1, 2}).letters == std::vector<std::int16_t>{2});
  CHECK(free_multiply(FreeWord{{1, 2}}, FreeWord{{-2, 1}}, 8).letters == std::vector<std::int16_t>{1, 1});
  CHECK(free_inverse(FreeWord{{1, -2}}).letters == std::vector<std::int16_t>{2, -1});
  CHECK_THROWS_AS(free_multiply(FreeWord{{1, 1}}, FreeWord{{1}}, 2), WordOverflow);
}

TEST_CASE("validation and point membership") {
  CHECK_THROWS_AS(validate_space(Torus{0}), PreconditionError);
  CHECK_THROWS_AS(validate_space(Interval{1.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(validate_space(Subshift{2, 1.5}), PreconditionError);
  CHECK(is_valid_point(Torus{2}, std::vector<double>{0.5, 0.25}));
  CHECK_FALSE(is_valid_point(Torus{2}, std::vector<double>{1.0, 0.25}));
  CHECK_FALSE(is_valid_point(Interval{0.0, 1.0}, 1.5));
  CHECK_THROWS_AS(check_point(Subshift{2, 0.5}, FreeWord{}), SpaceMismatch);
  CHECK_THROWS_AS(distance(Interval{0.0, 1.0}, 0.5, std::vector<double>{0.5}), SpaceMismatch);
}

TEST_CASE("approx_equal uses the tolerance") {
  CHECK(approx_equal(Interval{0.0, 1.0}, 0.5, 0.5 + 1e-13));
  CHECK_FALSE(approx_equal(Interval{0.0, 1.0}, 0.5, 0.5 + 1e-9));
  CHECK(approx_equal(Interval{0.0, 1.0}, 0.5, 0.5 + 1e-9, 1e-8));
}

TEST_CASE("space json round trip") {
  for (const auto& s : kSpaces) {
    auto j = space_to_json(s);
    CHECK(j["kind"] == space_kind(s));
    CHECK(space_to_json(space_from_json(j)) == j);
  }
  CHECK_THROWS_AS(space_from_json(nlohmann::json{{"kind", "sphere"}}), ConfigError);
  CHECK_THROWS_AS(space_from_json(nlohmann::json{{"kind", "torus"}, {"dim", 2}, {"extra", 1}}), ConfigError);
}

TEST_CASE("pseudo-metric axioms on random triples") {
  std::mt19937_64 rng(11);
  for (const auto& s : kSpaces) {
    CAPTURE(space_kind(s));
    std::size_t bad = 0;
    for (int t = 0; t < 1000; ++t) {
      Point x = random_point(s, rng), y = random_point(s, rng), z = random_point(s, rng);
      double xy = distance(s, x, y), yz = distance(s, y, z), xz = distance(s, x, z);
      if (distance(s, x, x) != 0.0) ++bad;
      if (xy != distance(s, y, x)) ++bad;
      if (xz > xy + yz + 1e-12) ++bad;
      if (std::holds_alternative<Subshift>(s) && xz > std::max(xy, yz) + 1e-15) ++bad;
      if (std::holds_alternative<EuclideanBounded>(s) && xy > 1.0) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("free group separation by parity") {
  std::mt19937_64 rng(5);
  FreeGroup fg{2, 32};
  for (int t = 0; t < 1000; ++t) {
    auto u = std::get<FreeWord>(random_point(fg, rng));
    auto v = std::get<FreeWord>(random_point(fg, rng));
    if (u == v) continue;
    double d = distance(fg, u, v);
    CHECK(d >= 1.0);
    if (u.letters.size() == v.letters.size()) CHECK(d >= 2.0);
  }
}
