#include <doctest.h>

#include <cmath>
#include <random>

#include "depthlab/errors.hpp"
#include "depthlab/rademacher.hpp"

using namespace depthlab;

namespace {

// E|sum of n signs| / n from the binomial distribution.
double binomial_mad(int n) {
  double total = 0.0, c = 1.0;
  for (int j = 0; j <= n; ++j) {
    total += c * std::fabs(2.0 * j - n);
    c = c * (n - j) / (j + 1);
  }
  return total / std::ldexp(1.0, n) / n;
}

FiniteClassValues random_class(std::mt19937_64& rng, std::size_t size, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FiniteClassValues v(n);
  for (std::size_t h = 0; h < size; ++h) {
    std::vector<double> row(n);
    for (auto& x : row) x = u(rng);
    v.add_row(row);
  }
  return v;
}

}  // namespace

TEST_CASE("all-zero class has zero complexity") {
  FiniteClassValues v({std::vector<double>(20, 0.0)});
  CHECK(exact_rademacher(v) == 0.0);
  CHECK(empirical_rademacher(v, 256, 1).mean == 0.0);
}

TEST_CASE("two constant hypotheses match the binomial mean absolute deviation") {
  for (int n = 1; n <= 16; ++n) {
    FiniteClassValues v({std::vector<double>(static_cast<std::size_t>(n), 1.0),
                         std::vector<double>(static_cast<std::size_t>(n), -1.0)});
    CHECK(exact_rademacher(v) == doctest::Approx(binomial_mad(n)).epsilon(1e-12));
  }
  FiniteClassValues big({std::vector<double>(40, 1.0), std::vector<double>(40, -1.0)});
  auto e = empirical_rademacher(big, 8192, 3);
  CHECK(std::fabs(e.mean - binomial_mad(40)) <= 4.0 * e.std_error);
}

TEST_CASE("estimates are bounded and reproducible") {
  std::mt19937_64 rng(2);
  auto v = random_class(rng, 30, 50);
  auto a = empirical_rademacher(v, 1024, 77, 1);
  auto b = empirical_rademacher(v, 1024, 77, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean <= v.bound());
  CHECK(a.std_error >= 0.0);
  CHECK(a.draws == 1024);
  CHECK(a.seed == 77);
  CHECK_FALSE(a.exact);
  auto small = random_class(rng, 5, 10);
  auto r = rademacher_complexity(small, 100, 1);
  CHECK(r.exact);
  CHECK(r.mean == exact_rademacher(small));
}

TEST_CASE("monte carlo agrees with exhaustive enumeration") {
  std::mt19937_64 rng(19);
  for (std::size_t n : {4u, 8u, 12u}) {
    auto v = random_class(rng, 20, n);
    auto e = empirical_rademacher(v, 4096, 5);
    CHECK(std::fabs(e.mean - exact_rademacher(v)) <= 3.0 * e.std_error + 1e-12);
  }
}

TEST_CASE("contraction keeps the complexity below the lipschitz multiple") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    auto v = random_class(rng, 12, 10);
    FiniteClassValues psi(10);
    for (std::size_t h = 0; h < v.size(); ++h) {
      std::vector<double> row(10);
      for (std::size_t i = 0; i < 10; ++i) {
        double x = v.row(h)[i];
        row[i] = 0.5 * x / (1.0 + std::fabs(x));
      }
      psi.add_row(row);
    }
    CHECK(exact_rademacher(psi) <= 0.5 * exact_rademacher(v) + 1e-12);
  }
}

TEST_CASE("closed-form bounds") {
  CHECK(massart_bound(1.0, 1, 10) == 0.0);
  CHECK(massart_bound(1.0, 7, 64) == doctest::Approx(std::sqrt(2.0 * std::log(7.0) / 64.0)));
  CHECK(massart_bound(1.0, 7, 128) == doctest::Approx(massart_bound(1.0, 7, 64) / std::sqrt(2.0)));
  CHECK(massart_bound(2.0, 7, 64) == doctest::Approx(2.0 * massart_bound(1.0, 7, 64)));
  CHECK_THROWS_AS(massart_bound(1.0, 0, 10), PreconditionError);

  CHECK(uniform_deviation_bound(0.1, 1.0, 0.05, 200, 1.0) ==
        doctest::Approx(0.2 + std::sqrt(2.0 * std::log(20.0) / 200.0)).epsilon(1e-14));
  CHECK(uniform_deviation_bound(0.0, 1.0, 1.0, 200, 1.0) == 0.0);
  CHECK(uniform_deviation_bound(0.1, 1.0, 0.05, 200, 3.0) - uniform_deviation_bound(0.1, 1.0, 0.05, 200, 1.0) ==
        doctest::Approx(0.4));
  CHECK_THROWS_AS(uniform_deviation_bound(0.1, 1.0, 0.0, 200, 1.0), PreconditionError);

  CHECK(hidden_output_bound(0.0, 0.0) == 0.0);
  CHECK(hidden_output_bound(0.05, 0.12) == doctest::Approx(0.17));
  CHECK(two_integral_bound(0.0, 0.0, 3.0, 50, 1.0) == 0.0);
  CHECK(two_integral_bound(0.2, 0.1, 2.0, 400, 1.0) == doctest::Approx(0.48));
}

TEST_CASE("massart dominates the empirical estimate") {
  std::mt19937_64 rng(29);
  for (std::size_t size : {1u, 4u, 32u, 256u}) {
    auto v = random_class(rng, size, 64);
    auto e = empirical_rademacher(v, 2048, size);
    CHECK(e.mean - 3.0 * e.std_error <= massart_bound(v.bound(), size, 64));
  }
}

TEST_CASE("report json") {
  RademacherEstimate e{0.25, 0.01, 100, 9, false};
  auto j = rademacher_report(e, {0.5, 0.6, 0.7});
  CHECK(j["estimate"] == 0.25);
  CHECK(j["bounds"]["two_integral"] == 0.7);
  CHECK(j["seed"] == 9);
}

TEST_CASE("class values reject ragged rows") {
  FiniteClassValues v(3);
  CHECK_THROWS(v.add_row(std::vector<double>{1.0, 2.0}));
}
