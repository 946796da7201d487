#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace depthlab {

// bias(k) = exp(-alpha k) or k^-beta.
struct BiasModel {
  enum class Kind { ExpDecay, PolyDecay };
  Kind kind = Kind::ExpDecay;
  double param = 1.0;
  double operator()(double k) const;
};

// var(k, n) = sqrt(log k / n) or sqrt(k^gamma / n).
struct VarModel {
  enum class Kind { RootLog, RootPoly };
  Kind kind = Kind::RootLog;
  double gamma = 1.0;
  double operator()(double k, double n) const;
};

enum class Regime { EL, EP, PL, PP };
std::string regime_name(Regime r);
Regime regime_from_name(const std::string& s);
Regime regime_of(const BiasModel& b, const VarModel& v);
// alpha is used by E regimes, beta by P regimes, gamma by the polynomial variance.
void models_for(Regime r, double alpha, double beta, double gamma, BiasModel& b, VarModel& v);

double lambert_w0(double x);

struct CurvePoint {
  double k, bias, var, gen;
};
std::vector<CurvePoint> generalization_curve(const BiasModel& b, const VarModel& v, double n,
                                             const std::vector<double>& ks);
std::string curve_csv(const std::vector<CurvePoint>& c);

struct DepthSolution {
  Regime regime = Regime::EL;
  double k_star_closed = 1.0;
  double k_star_numeric = 1.0;
  double gen_closed = 0.0;
  double gen_at_star = 0.0;
  std::string form;
};

// Closed-form depth with the lower-order correction terms dropped, clamped to >= 1.
double closed_form_depth(const BiasModel& b, const VarModel& v, double n);
// Golden-section minimiser of bias + var over log k in [0, log n].
double numeric_depth(const BiasModel& b, const VarModel& v, double n);
DepthSolution optimal_depth(const BiasModel& b, const VarModel& v, double n);
nlohmann::json depth_solution_to_json(const DepthSolution& s);

struct RiskInputs {
  double eps_imp = 0.0;
  double eps_model = 0.0;
  double r_hat = 0.0;
  double b = 0.0;
  double delta = 0.5;
  double n = 1.0;
  double beta_L = 1.0;
  double beta_Lhat = 1.0;
  double beta_ell = 1.0;
};

double excess_risk_bound(const RiskInputs& r);
double gap_bound(const RiskInputs& r);

}  // namespace depthlab
