// Regime properties stated as targets for the optimal-depth solver. Each line
// reports the measured value; the exit status is nonzero when any fails.

#include <cmath>
#include <cstdio>

#include "depthlab/regime.hpp"

using namespace depthlab;

namespace {

const Regime kAll[] = {Regime::EL, Regime::EP, Regime::PL, Regime::PP};

struct Models {
  BiasModel b;
  VarModel v;
};

Models models(Regime r, double beta = 2.0) {
  Models m;
  models_for(r, 1.0, beta, 1.0, m.b, m.v);
  return m;
}

bool report(const char* name, bool ok, const char* detail) {
  std::printf("%s %-34s %s\n", ok ? "PASS" : "FAIL", name, detail);
  return ok;
}

}  // namespace

int main() {
  const double ns[] = {1e3, 1e4, 1e5, 1e6, 1e7};
  bool all = true;
  char buf[256];

  double worst_balance = 0.0;
  for (Regime r : kAll)
    for (double n : ns) {
      auto m = models(r);
      auto s = optimal_depth(m.b, m.v, n);
      double bias = m.b(s.k_star_numeric), var = m.v(s.k_star_numeric, n);
      worst_balance = std::max(worst_balance, std::fabs(bias - var) / (bias + var));
    }
  std::snprintf(buf, sizeof buf, "worst |bias - var| / gen = %.3f (limit 0.25)", worst_balance);
  all &= report("balance at numeric optimum", worst_balance <= 0.25, buf);

  int violations = 0;
  double first_n = 0.0;
  double g[4] = {0, 0, 0, 0};
  for (double n : ns) {
    if (n < 1e4) continue;
    double here[4];
    for (Regime r : kAll) {
      auto m = models(r);
      here[static_cast<int>(r)] = optimal_depth(m.b, m.v, n).gen_at_star;
    }
    if (!(here[0] <= here[1] && here[1] <= here[2] && here[2] <= here[3])) {
      if (violations++ == 0) {
        first_n = n;
        for (int i = 0; i < 4; ++i) g[i] = here[i];
      }
    }
  }
  if (violations)
    std::snprintf(buf, sizeof buf, "%d of 4 n values out of order; n=%.0e EL %.4g EP %.4g PL %.4g PP %.4g", violations,
                  first_n, g[0], g[1], g[2], g[3]);
  else
    std::snprintf(buf, sizeof buf, "EL <= EP <= PL <= PP for n >= 1e4");
  all &= report("ordering of optimised rates", violations == 0, buf);

  double worst_gap = 0.0;
  for (Regime r : kAll)
    for (double n : ns) {
      auto m = models(r);
      auto s = optimal_depth(m.b, m.v, n);
      worst_gap = std::max(worst_gap, s.gen_closed / s.gen_at_star - 1.0);
    }
  std::snprintf(buf, sizeof buf, "worst gen(closed) / gen(numeric) - 1 = %.3f (limit 0.05)", worst_gap);
  all &= report("closed form within 5% on gen", worst_gap <= 0.05, buf);

  auto pl = models(Regime::PL);
  auto s = optimal_depth(pl.b, pl.v, 1e4);
  double pl_gap = s.gen_closed / s.gen_at_star - 1.0;
  std::snprintf(buf, sizeof buf, "PL beta=2 n=1e4: k closed %.3f numeric %.3f, gen excess %.3f", s.k_star_closed,
                s.k_star_numeric, pl_gap);
  all &= report("PL closed form within 5% on gen", pl_gap <= 0.05, buf);

  return all ? 0 : 1;
}
