#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "depthlab/eval_matrix.hpp"
#include "depthlab/simd/kernels.hpp"

using namespace depthlab;
using namespace depthlab::simd;

namespace {

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  if (const auto* t = avx2_kernels()) out.push_back(t);
  if (const auto* t = neon_kernels()) out.push_back(t);
  return out;
}

std::vector<double> random_row(std::mt19937_64& rng, std::size_t len, RealMetric m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(len);
  for (auto& x : v) x = m == RealMetric::Circular ? std::min(u(rng), 0.9999999) : 3.0 * u(rng) - 1.5;
  return v;
}

// Independent reference: per-probe squared distance, four lanes, fixed combine order.
double reference_sum(RealMetric m, const double* a, const double* b, std::size_t n, std::size_t dim) {
  double lanes[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      double d = a[c * n + i] - b[c * n + i];
      if (m == RealMetric::Circular) d = std::min(std::fabs(d), 1.0 - std::fabs(d));
      s = s + d * d;
    }
    if (m == RealMetric::Capped) s = std::min(s, 1.0);
    lanes[i % 4] += s;
  }
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

TEST_CASE("scalar kernels match the lane reference exactly") {
  std::mt19937_64 rng(3);
  const auto& s = scalar_kernels();
  for (RealMetric m : {RealMetric::Euclid, RealMetric::Circular, RealMetric::Capped})
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 65u, 257u})
      for (std::size_t dim : {1u, 2u, 3u}) {
        auto a = random_row(rng, n * dim, m), b = random_row(rng, n * dim, m);
        double inf = std::numeric_limits<double>::infinity();
        CHECK(s.real_sum(m, a.data(), b.data(), n, dim, inf) == reference_sum(m, a.data(), b.data(), n, dim));
      }
}

TEST_CASE("vector kernels are bit-identical to scalar") {
  auto tables = vector_tables();
  if (tables.empty()) {
    MESSAGE("no vector kernels on this machine");
    return;
  }
  std::mt19937_64 rng(17);
  const auto& s = scalar_kernels();
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto* t : tables) {
    CAPTURE(t->name);
    for (RealMetric m : {RealMetric::Euclid, RealMetric::Circular, RealMetric::Capped})
      for (std::size_t n : {1u, 2u, 5u, 8u, 63u, 64u, 129u, 1000u})
        for (std::size_t dim : {1u, 2u, 3u})
          for (int rep = 0; rep < 5; ++rep) {
            auto a = random_row(rng, n * dim, m), b = random_row(rng, n * dim, m);
            double ss = s.real_sum(m, a.data(), b.data(), n, dim, inf);
            double vs = t->real_sum(m, a.data(), b.data(), n, dim, inf);
            CHECK(std::memcmp(&ss, &vs, sizeof ss) == 0);
            double sm = s.real_max(m, a.data(), b.data(), n, dim, inf);
            double vm = t->real_max(m, a.data(), b.data(), n, dim, inf);
            CHECK(sm == vm);
            // Early exit: both stop with values past the threshold.
            double stop = 0.25 * ss;
            double se = s.real_sum(m, a.data(), b.data(), n, dim, stop);
            double ve = t->real_sum(m, a.data(), b.data(), n, dim, stop);
            CHECK(std::memcmp(&se, &ve, sizeof se) == 0);
          }

    for (std::size_t cell : {16u, 32u})
      for (std::size_t ncells : {1u, 5u, 64u}) {
        std::vector<std::uint8_t> a(cell * ncells), b(cell * ncells);
        for (auto& x : a) x = static_cast<std::uint8_t>(rng() % 3);
        b = a;
        for (std::size_t j = 0; j < ncells; ++j)
          if (rng() % 4) b[j * cell + rng() % cell] ^= 1;
        std::vector<std::uint32_t> os(ncells), ov(ncells);
        s.cell_mismatch(a.data(), b.data(), ncells, cell, os.data());
        t->cell_mismatch(a.data(), b.data(), ncells, cell, ov.data());
        CHECK(os == ov);
        for (std::size_t j = 0; j < ncells; ++j) {
          std::uint32_t want = static_cast<std::uint32_t>(cell);
          for (std::size_t i = 0; i < cell; ++i)
            if (a[j * cell + i] != b[j * cell + i]) {
              want = static_cast<std::uint32_t>(i);
              break;
            }
          CHECK(os[j] == want);
        }
      }
  }
}

TEST_CASE("real_sum early exit returns a value past the stop") {
  const auto& s = scalar_kernels();
  std::vector<double> a(256, 0.0), b(256, 1.0);
  double v = s.real_sum(RealMetric::Euclid, a.data(), b.data(), 256, 1, 10.0);
  CHECK(v > 10.0);
  CHECK(v <= 256.0);
  double m = s.real_max(RealMetric::Euclid, a.data(), b.data(), 256, 1, 0.5);
  CHECK(m >= 0.5);
}

TEST_CASE("isa selection and matrix distances agree across tables") {
  const Isa before = active_isa();
  REQUIRE(set_isa(Isa::Scalar));
  CHECK(active_isa() == Isa::Scalar);
  CHECK(std::string(active_kernels().name) == scalar_kernels().name);

  std::mt19937_64 rng(23);
  EvalMatrix m(Torus{2}, 97);
  for (int r = 0; r < 6; ++r) {
    std::vector<Point> row;
    for (int i = 0; i < 97; ++i) row.push_back(std::vector<double>{wrap_unit(rng() * 0x1p-64), wrap_unit(rng() * 0x1p-64)});
    m.append_points(row);
  }
  std::vector<double> scalar_d;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) scalar_d.push_back(d_S(m, a, b));
  if (set_isa(Isa::Avx2) || set_isa(Isa::Neon)) {
    std::size_t i = 0;
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) CHECK(d_S(m, a, b) == scalar_d[i++]);
  }
  set_isa(before);
}
