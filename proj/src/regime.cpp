#include "depthlab/regime.hpp"

#include <cmath>
#include <limits>

#include "depthlab/errors.hpp"
#include "depthlab/growth.hpp"

namespace depthlab {

double BiasModel::operator()(double k) const {
  return kind == Kind::ExpDecay ? std::exp(-param * k) : std::pow(k, -param);
}

double VarModel::operator()(double k, double n) const {
  if (kind == Kind::RootLog) return k <= 1.0 ? 0.0 : std::sqrt(std::log(k) / n);
  return std::sqrt(std::pow(k, gamma) / n);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::EL: return "EL";
    case Regime::EP: return "EP";
    case Regime::PL: return "PL";
    case Regime::PP: return "PP";
  }
  return "?";
}

Regime regime_from_name(const std::string& s) {
  if (s == "EL") return Regime::EL;
  if (s == "EP") return Regime::EP;
  if (s == "PL") return Regime::PL;
  if (s == "PP") return Regime::PP;
  throw ConfigError("unknown regime '" + s + "' (expected EL, EP, PL or PP)");
}

Regime regime_of(const BiasModel& b, const VarModel& v) {
  const bool e = b.kind == BiasModel::Kind::ExpDecay;
  const bool l = v.kind == VarModel::Kind::RootLog;
  return e ? (l ? Regime::EL : Regime::EP) : (l ? Regime::PL : Regime::PP);
}

void models_for(Regime r, double alpha, double beta, double gamma, BiasModel& b, VarModel& v) {
  const bool e = r == Regime::EL || r == Regime::EP;
  const bool l = r == Regime::EL || r == Regime::PL;
  b.kind = e ? BiasModel::Kind::ExpDecay : BiasModel::Kind::PolyDecay;
  b.param = e ? alpha : beta;
  v.kind = l ? VarModel::Kind::RootLog : VarModel::Kind::RootPoly;
  v.gamma = gamma;
  if (!(b.param > 0.0)) throw PreconditionError("bias parameter must be positive");
  if (!l && !(gamma > 0.0)) throw PreconditionError("gamma must be positive");
}

double lambert_w0(double x) {
  const double branch = -1.0 / std::exp(1.0);
  if (std::isnan(x) || x < branch) throw PreconditionError("lambert_w0 needs x >= -1/e");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  double w;
  if (x >= 0.0) {
    w = std::log1p(x);
  } else {
    double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
    w = -1.0 + p - p * p / 3.0;
  }
  for (int it = 0; it < 100; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    double step = f / denom;
    w -= step;
    if (std::fabs(step) <= 1e-16 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

std::vector<CurvePoint> generalization_curve(const BiasModel& b, const VarModel& v, double n,
                                             const std::vector<double>& ks) {
  std::vector<CurvePoint> out;
  for (double k : ks) {
    if (!(k >= 1.0)) throw PreconditionError("curve depths must be >= 1");
    double bias = b(k), var = v(k, n);
    out.push_back({k, bias, var, bias + var});
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& c) {
  std::string out = "k,bias,var,gen\n";
  for (const auto& p : c)
    out += format_double(p.k) + "," + format_double(p.bias) + "," + format_double(p.var) + "," +
           format_double(p.gen) + "\n";
  return out;
}

double closed_form_depth(const BiasModel& b, const VarModel& v, double n) {
  if (!(n >= 3.0)) throw PreconditionError("optimal depth needs n >= 3");
  const double ln = std::log(n);
  double k = 1.0;
  switch (regime_of(b, v)) {
    case Regime::EP: k = (ln - v.gamma * std::log(ln)) / (2.0 * b.param); break;
    case Regime::EL: k = (ln - std::log(std::log(ln))) / (2.0 * b.param); break;
    case Regime::PP: k = std::pow(n, 1.0 / (2.0 * b.param + v.gamma)); break;
    case Regime::PL: k = std::exp(lambert_w0(2.0 * b.param * n) / (2.0 * b.param)); break;
  }
  return std::max(1.0, k);
}

double numeric_depth(const BiasModel& b, const VarModel& v, double n) {
  if (!(n >= 3.0)) throw PreconditionError("optimal depth needs n >= 3");
  auto g = [&](double t) {
    double k = std::exp(t);
    return b(k) + v(k, n);
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = std::log(n);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = g(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  // The interval ends are candidates too.
  double best_t = t, best = g(t);
  for (double e : {0.0, std::log(n)})
    if (g(e) < best) {
      best = g(e);
      best_t = e;
    }
  return std::exp(best_t);
}

DepthSolution optimal_depth(const BiasModel& b, const VarModel& v, double n) {
  DepthSolution s;
  s.regime = regime_of(b, v);
  s.k_star_closed = closed_form_depth(b, v, n);
  s.k_star_numeric = numeric_depth(b, v, n);
  s.gen_closed = b(s.k_star_closed) + v(s.k_star_closed, n);
  s.gen_at_star = b(s.k_star_numeric) + v(s.k_star_numeric, n);
  switch (s.regime) {
    case Regime::EP: s.form = "k = (log n - gamma log log n) / (2 alpha)"; break;
    case Regime::EL: s.form = "k = (log n - log log log n) / (2 alpha)"; break;
    case Regime::PP: s.form = "k = n^(1/(2 beta + gamma))"; break;
    case Regime::PL: s.form = "k = exp(W(2 beta n) / (2 beta))"; break;
  }
  return s;
}

nlohmann::json depth_solution_to_json(const DepthSolution& s) {
  return {{"regime", regime_name(s.regime)},  {"k_star_closed", s.k_star_closed},
          {"k_star_numeric", s.k_star_numeric}, {"gen_closed", s.gen_closed},
          {"gen_at_star", s.gen_at_star},       {"form", s.form}};
}

namespace {
void check_risk(const RiskInputs& r) {
  if (!(r.delta > 0.0 && r.delta <= 1.0)) throw PreconditionError("delta must lie in (0,1)");
  if (!(r.n > 0.0)) throw PreconditionError("n must be positive");
  for (double x : {r.eps_imp, r.eps_model, r.r_hat, r.b, r.beta_L, r.beta_Lhat, r.beta_ell})
    if (!(x >= 0.0)) throw PreconditionError("risk inputs must be nonnegative");
}
}  // namespace

double excess_risk_bound(const RiskInputs& r) {
  check_risk(r);
  return r.beta_L * r.eps_imp + r.eps_model + 4.0 * r.beta_ell * r.r_hat +
         2.0 * r.b * std::sqrt(2.0 * std::log(1.0 / r.delta) / r.n);
}

double gap_bound(const RiskInputs& r) {
  check_risk(r);
  return (r.beta_L + r.beta_Lhat) * r.eps_imp + 2.0 * r.beta_ell * r.r_hat +
         r.b * std::sqrt(2.0 * std::log(1.0 / r.delta) / r.n);
}

}  // namespace depthlab
