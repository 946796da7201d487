#include <doctest.h>

#include <cmath>

#include "depthlab/errors.hpp"
#include "depthlab/regime.hpp"

using namespace depthlab;

namespace {

// W(x) by the fixed-point iteration w = x e^{-w}, convergent for 0 < x < e.
double lambert_fixed_point(double x) {
  double w = 0.5;
  for (int i = 0; i < 10000; ++i) w = x * std::exp(-w);
  return w;
}

DepthSolution solve(Regime r, double n, double alpha = 1.0, double beta = 2.0, double gamma = 1.0) {
  BiasModel b;
  VarModel v;
  models_for(r, alpha, beta, gamma, b, v);
  return optimal_depth(b, v, n);
}

}  // namespace

TEST_CASE("lambert w examples and residual") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(lambert_w0(1.0) - lambert_fixed_point(1.0)) <= 1e-12);
  CHECK(std::fabs(lambert_w0(1.0) - 0.567143290409) <= 1e-12);
  CHECK(lambert_w0(-1.0 / std::exp(1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS_AS(lambert_w0(-0.5), PreconditionError);
  for (int i = 0; i <= 360; ++i) {
    double x = std::pow(10.0, -6.0 + 18.0 * i / 360.0);
    double w = lambert_w0(x);
    CHECK(std::fabs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, x));
  }
}

TEST_CASE("bias and variance curves") {
  BiasModel e{BiasModel::Kind::ExpDecay, 1.0}, p{BiasModel::Kind::PolyDecay, 2.0};
  VarModel rl{VarModel::Kind::RootLog, 1.0}, rp{VarModel::Kind::RootPoly, 1.0};
  CHECK(e(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(p(10.0) == doctest::Approx(0.01));
  CHECK(rp(4.0, 100.0) == doctest::Approx(0.2));
  CHECK(rl(1.0, 100.0) == 0.0);
  auto c = generalization_curve(p, rp, 100.0, {1.0, 2.0, 4.0});
  REQUIRE(c.size() == 3);
  CHECK(c[2].gen == doctest::Approx(1.0 / 16.0 + 0.2));
  CHECK(curve_csv(c).rfind("k,bias,var,gen\n", 0) == 0);
  CHECK_THROWS_AS(generalization_curve(p, rp, 100.0, {0.0}), PreconditionError);
  CHECK(regime_of(e, rl) == Regime::EL);
  CHECK(regime_of(p, rp) == Regime::PP);
  CHECK(regime_from_name("PL") == Regime::PL);
  CHECK_THROWS_AS(regime_from_name("XX"), ConfigError);
}

TEST_CASE("closed-form depths") {
  CHECK(solve(Regime::PP, 1e5).k_star_closed == doctest::Approx(10.0).epsilon(1e-12));
  const double n = std::exp(10.0);
  auto el = solve(Regime::EL, n);
  CHECK(el.k_star_closed == doctest::Approx((10.0 - std::log(std::log(10.0))) / 2.0));
  CHECK(std::fabs(el.k_star_closed - 5.0) < 0.5);
  auto pl = solve(Regime::PL, 1e4);
  const double x = 2.0 * 2.0 * 1e4;
  CHECK(pl.k_star_closed == doctest::Approx(std::pow(x / lambert_w0(x), 1.0 / 4.0)).epsilon(1e-12));
  auto ep = solve(Regime::EP, 1e4);
  CHECK(ep.k_star_closed == doctest::Approx((std::log(1e4) - std::log(std::log(1e4))) / 2.0));
}

TEST_CASE("solutions are self-consistent and deep") {
  for (Regime r : {Regime::EL, Regime::EP, Regime::PL, Regime::PP})
    for (double n : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7}) {
      CAPTURE(regime_name(r));
      CAPTURE(n);
      BiasModel b;
      VarModel v;
      models_for(r, 1.0, 2.0, 1.0, b, v);
      auto s = optimal_depth(b, v, n);
      CHECK(s.k_star_closed >= 1.0);
      CHECK(s.k_star_numeric > 1.0);
      CHECK(std::fabs(s.gen_at_star - (b(s.k_star_numeric) + v(s.k_star_numeric, n))) <= 1e-12);
      CHECK(s.gen_at_star <= s.gen_closed + 1e-12);
      // The numeric minimiser is a local minimum of the continuous relaxation.
      CHECK(s.gen_at_star <= b(s.k_star_numeric * 1.01) + v(s.k_star_numeric * 1.01, n) + 1e-15);
      CHECK(s.gen_at_star <= b(s.k_star_numeric / 1.01) + v(s.k_star_numeric / 1.01, n) + 1e-15);
    }
}

TEST_CASE("PP depth follows the power law") {
  std::vector<double> lx, ly;
  for (double n : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    lx.push_back(std::log(n));
    ly.push_back(std::log(solve(Regime::PP, n).k_star_numeric));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / 5.0;
    my += ly[i] / 5.0;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  CHECK(sxy / sxx == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("optimal depth preconditions") {
  CHECK_THROWS_AS(solve(Regime::PP, 2.0), PreconditionError);
  BiasModel b;
  VarModel v;
  CHECK_THROWS_AS(models_for(Regime::EP, 0.0, 2.0, 1.0, b, v), PreconditionError);
  CHECK_THROWS_AS(models_for(Regime::PP, 1.0, 2.0, 0.0, b, v), PreconditionError);
  auto j = depth_solution_to_json(solve(Regime::PP, 1e5));
  CHECK(j["regime"] == "PP");
  CHECK(j["k_star_closed"].get<double>() == doctest::Approx(10.0));
}

TEST_CASE("risk bounds") {
  RiskInputs r;
  r.delta = 0.5;
  r.b = 1.0;
  r.n = 2.0;
  CHECK(excess_risk_bound(r) == doctest::Approx(2.0 * std::sqrt(std::log(2.0))));
  CHECK(excess_risk_bound(r) == doctest::Approx(1.6651).epsilon(1e-4));

  RiskInputs zero;
  zero.delta = 1.0;
  zero.b = 1.0;
  CHECK(excess_risk_bound(zero) == 0.0);

  RiskInputs slope = r;
  slope.beta_ell = 1.5;
  double base = excess_risk_bound(slope);
  slope.r_hat = 0.1;
  CHECK(excess_risk_bound(slope) - base == doctest::Approx(4.0 * 1.5 * 0.1));

  RiskInputs g;
  g.delta = std::exp(-2.0);
  g.b = 1.0;
  g.n = 1.0;
  CHECK(gap_bound(g) == doctest::Approx(2.0));
  g.beta_L = 2.0;
  g.beta_Lhat = 3.0;
  double before = gap_bound(g);
  g.eps_imp = 0.1;
  CHECK(gap_bound(g) - before == doctest::Approx(0.5));

  // Monotone in every input.
  RiskInputs m{0.1, 0.1, 0.1, 1.0, 0.3, 50.0, 1.0, 1.0, 1.0};
  double e0 = excess_risk_bound(m), g0 = gap_bound(m);
  for (double RiskInputs::*field : {&RiskInputs::eps_imp, &RiskInputs::eps_model, &RiskInputs::r_hat, &RiskInputs::b,
                                    &RiskInputs::beta_L, &RiskInputs::beta_Lhat, &RiskInputs::beta_ell}) {
    RiskInputs up = m;
    up.*field += 0.5;
    CHECK(excess_risk_bound(up) >= e0);
    CHECK(gap_bound(up) >= g0);
  }
  RiskInputs tighter = m;
  tighter.delta = 0.6;
  CHECK(excess_risk_bound(tighter) <= e0);

  RiskInputs bad = m;
  bad.delta = 0.0;
  CHECK_THROWS_AS(excess_risk_bound(bad), PreconditionError);
  bad = m;
  bad.r_hat = -0.1;
  CHECK_THROWS_AS(gap_bound(bad), PreconditionError);
}
