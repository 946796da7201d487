#include "depthlab/growth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "depthlab/errors.hpp"
#include "depthlab/parallel.hpp"

namespace depthlab {

namespace {

struct LinearFit {
  double intercept = 0.0, slope = 0.0, mse = 0.0, r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.mse = ss / n;
  f.r2 = syy > 0.0 ? std::clamp(1.0 - ss / syy, 0.0, 1.0) : 1.0;
  return f;
}

// Leading coefficient and linear coefficient of a least-squares quadratic.
std::pair<double, double> fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int d = 0; d < 5; ++d) {
      s[d] += p;
      if (d < 3) t[d] += p * y[i];
      p *= x[i];
    }
  }
  double a[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[piv][j]);
    if (a[c][c] == 0.0) return {0.0, 0.0};
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (int j = 0; j < 4; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return {a[2][3] / a[2][2], a[1][3] / a[1][1]};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, int line) {
  long long v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

bool same_eps(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b)); }

}  // namespace

std::string word_set_name(WordSet w) { return w == WordSet::Ball ? "ball" : "sphere"; }

WordSet word_set_from_name(const std::string& s) {
  if (s == "ball") return WordSet::Ball;
  if (s == "sphere") return WordSet::Sphere;
  throw ConfigError("unknown word set '" + s + "' (expected ball or sphere)");
}

std::vector<GrowthCell> GrowthProfile::at_epsilon(double eps) const {
  std::vector<GrowthCell> out;
  for (const auto& c : cells)
    if (same_eps(c.epsilon, eps)) out.push_back(c);
  std::stable_sort(out.begin(), out.end(), [](const GrowthCell& a, const GrowthCell& b) { return a.k < b.k; });
  return out;
}

GrowthProfile growth_profile(const GrowthRequest& req) {
  if (req.ks.empty() || req.epsilons.empty()) throw PreconditionError("growth profile needs depths and epsilons");
  for (std::size_t i = 0; i < req.ks.size(); ++i) {
    if (req.ks[i] < 0) throw PreconditionError("depths must be nonnegative");
    if (i > 0 && req.ks[i] <= req.ks[i - 1]) throw PreconditionError("depths must be strictly ascending");
  }
  for (double e : req.epsilons)
    if (!(e > 0.0) || !std::isfinite(e)) throw PreconditionError("epsilons must be positive");

  GrowthProfile p;
  p.family = req.family.name;
  p.strategy = strategy_name(req.strategy);
  p.metric = req.metric;
  const bool per_depth = probes_depend_on_depth(req.probes, req.family.space);

  WordBall shared;
  ProbeSet shared_probes;
  EvalMatrix shared_m;
  const int kmax = req.ks.back();
  if (!per_depth) {
    shared_probes = make_probes(req.family, req.probes, kmax);
    shared = enumerate_partial(req.family, kmax, req.strategy, req.cap, &shared_probes);
    shared_m = evaluate(req.family, shared, shared_probes, nullptr, req.threads);
    p.probes = shared_probes.tag;
  }

  for (int k : req.ks) {
    WordBall local;
    ProbeSet local_probes;
    EvalMatrix local_m;
    const WordBall* ball = &shared;
    const EvalMatrix* m = &shared_m;
    if (per_depth) {
      local_probes = make_probes(req.family, req.probes, k);
      local = enumerate_partial(req.family, k, req.strategy, req.cap, &local_probes);
      std::vector<std::size_t> sel =
          req.words == WordSet::Ball ? local.ball_rows(k) : local.layer(k);
      local_m = evaluate(req.family, local, local_probes, &sel, req.threads);
      ball = &local;
      m = &local_m;
      if (p.probes.empty()) p.probes = req.probes.kind;
    }
    const bool capped = ball->cap_exceeded_depth >= 0 && k >= ball->cap_exceeded_depth;
    // Row positions in the evaluated matrix (ball rows are a prefix of the BFS order).
    std::vector<std::size_t> rows;
    if (per_depth) {
      rows.resize(m->rows());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    } else {
      rows = req.words == WordSet::Ball ? ball->ball_rows(k) : ball->layer(k);
    }
    std::vector<GrowthCell> cells(req.epsilons.size());
    parallel_for(req.epsilons.size(), req.threads, [&](std::size_t e) {
      GrowthCell c;
      c.k = k;
      c.epsilon = req.epsilons[e];
      c.cap_exceeded = capped;
      if (rows.empty()) {
        c.bracket.epsilon = c.epsilon;
        c.bracket.exact = 0;
      } else {
        c.bracket = covering_bracket(*m, req.metric, c.epsilon, &rows, true);
      }
      cells[e] = c;
    });
    for (auto& c : cells) p.cells.push_back(c);
  }
  return p;
}

std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string profile_csv(const GrowthProfile& p, const std::string& config_hash) {
  std::string out = "#config-hash," + config_hash + "\n#version," DEPTHLAB_VERSION "\n";
  out += "family,strategy,metric,k,epsilon,lower,upper,exact,cap_exceeded\n";
  for (const auto& c : p.cells) {
    out += p.family + "," + p.strategy + "," + metric_name(p.metric) + "," + std::to_string(c.k) + "," +
           format_double(c.epsilon) + "," + std::to_string(c.bracket.lower) + "," +
           std::to_string(c.bracket.upper) + "," + (c.bracket.exact ? std::to_string(*c.bracket.exact) : "") + "," +
           (c.cap_exceeded ? "1" : "0") + "\n";
  }
  return out;
}

GrowthProfile profile_from_csv(const std::string& text) {
  GrowthProfile p;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line, ',');
    if (!header) {
      if (line != "family,strategy,metric,k,epsilon,lower,upper,exact,cap_exceeded")
        throw ConfigError("line " + std::to_string(lineno) + ": unexpected profile header");
      header = true;
      continue;
    }
    if (f.size() != 9) throw ConfigError("line " + std::to_string(lineno) + ": expected 9 fields");
    if (p.cells.empty()) {
      p.family = f[0];
      p.strategy = f[1];
      p.metric = metric_from_name(f[2]);
    }
    GrowthCell c;
    c.k = static_cast<int>(parse_int(f[3], lineno));
    c.epsilon = parse_double(f[4], lineno);
    c.bracket.epsilon = c.epsilon;
    c.bracket.lower = static_cast<std::size_t>(parse_int(f[5], lineno));
    c.bracket.upper = static_cast<std::size_t>(parse_int(f[6], lineno));
    if (!f[7].empty()) c.bracket.exact = static_cast<std::size_t>(parse_int(f[7], lineno));
    c.cap_exceeded = parse_int(f[8], lineno) != 0;
    p.cells.push_back(c);
  }
  if (!header) throw ConfigError("profile has no header line");
  return p;
}

std::string growth_kind_name(GrowthClass::Kind k) {
  switch (k) {
    case GrowthClass::Kind::Saturate: return "saturate";
    case GrowthClass::Kind::Polynomial: return "polynomial";
    case GrowthClass::Kind::Exponential: return "exponential";
    case GrowthClass::Kind::SuperExponential: return "super_exponential";
  }
  return "?";
}

GrowthClass classify_growth(const GrowthProfile& p, double eps) {
  auto cells = p.at_epsilon(eps);
  if (cells.size() < 5)
    throw InsufficientData("classification needs at least 5 depths at epsilon " + format_double(eps) + ", found " +
                           std::to_string(cells.size()));
  GrowthClass g;
  for (const auto& c : cells)
    if (c.cap_exceeded) {
      g.kind = GrowthClass::Kind::SuperExponential;
      g.evidence_depth = c.k;
      return g;
    }
  const std::size_t n = cells.size();
  const std::size_t window = (2 * n + 4) / 5;
  bool flat = true;
  for (std::size_t i = n - window; i < n; ++i) flat &= cells[i].bracket.upper == cells[n - 1].bracket.upper;
  if (flat) {
    std::size_t start = n - window;
    while (start > 0 && cells[start - 1].bracket.upper == cells[n - 1].bracket.upper) --start;
    g.kind = GrowthClass::Kind::Saturate;
    g.plateau_k = cells[start].k;
    g.r2 = 1.0;
    return g;
  }
  std::vector<double> lx, ly, sx, sy;
  for (const auto& c : cells) {
    if (c.bracket.upper == 0 || c.k < 1) continue;
    double y = std::log(static_cast<double>(c.bracket.upper));
    sx.push_back(c.k);
    sy.push_back(y);
    if (c.k >= 2) {
      lx.push_back(std::log(static_cast<double>(c.k)));
      ly.push_back(y);
    }
  }
  if (lx.size() < 3 || sx.size() < 3) throw InsufficientData("too few positive depths to fit growth");
  LinearFit poly = fit_line(lx, ly), expo = fit_line(sx, sy);
  if (poly.mse <= expo.mse) {
    g.kind = GrowthClass::Kind::Polynomial;
    g.degree = std::max(0.0, poly.slope);
    g.r2 = poly.r2;
    return g;
  }
  auto [c2, c1] = fit_quadratic(sx, sy);
  const double span = sx.back() - sx.front();
  if (expo.slope > 0.0 && c2 * span / expo.slope > 0.5) {
    g.kind = GrowthClass::Kind::SuperExponential;
    g.r2 = expo.r2;
    g.rate = std::exp(expo.slope);
    (void)c1;
    return g;
  }
  g.kind = GrowthClass::Kind::Exponential;
  g.rate = std::exp(expo.slope);
  g.r2 = expo.r2;
  return g;
}

nlohmann::json growth_class_to_json(const GrowthClass& g) {
  nlohmann::json j{{"class", growth_kind_name(g.kind)}};
  switch (g.kind) {
    case GrowthClass::Kind::Saturate: j["plateau_k"] = g.plateau_k; break;
    case GrowthClass::Kind::Polynomial:
      j["degree"] = g.degree;
      j["r2"] = g.r2;
      break;
    case GrowthClass::Kind::Exponential:
      j["rate"] = g.rate;
      j["r2"] = g.r2;
      break;
    case GrowthClass::Kind::SuperExponential:
      if (g.evidence_depth >= 0)
        j["cap_exceeded_depth"] = g.evidence_depth;
      else
        j["rate"] = g.rate;
      break;
  }
  return j;
}

std::vector<double> default_epsilon_grid(double diam, int steps) {
  if (!(diam > 0.0)) throw PreconditionError("diameter must be positive");
  if (steps < 2) throw PreconditionError("grid needs at least two steps");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int j = 0; j < steps; ++j)
    out[static_cast<std::size_t>(j)] = diam * std::exp2(-8.0 + 8.0 * j / (steps - 1));
  out.back() = diam;
  return out;
}

double dudley_integral(const std::vector<double>& eps, const std::vector<std::size_t>& upper, std::size_t reps,
                       double lipschitz, std::size_t n) {
  if (eps.size() != upper.size()) throw PreconditionError("dudley grid and bracket sizes differ");
  if (n == 0) throw PreconditionError("sample size must be positive");
  if (reps == 0) throw PreconditionError("empty ball");
  if (reps == 1) return 0.0;
  if (eps.empty()) throw PreconditionError("dudley integral needs grid cells");
  auto root_log = [](std::size_t v) { return v > 1 ? std::sqrt(std::log(static_cast<double>(v))) : 0.0; };
  double prev_e = 0.0, prev_v = root_log(reps), acc = 0.0;
  for (std::size_t j = 0; j < eps.size(); ++j) {
    if (!(eps[j] > prev_e)) throw PreconditionError("dudley grid must be positive and ascending");
    double v = root_log(std::min(upper[j], reps));
    acc += 0.5 * (eps[j] - prev_e) * (v + prev_v);
    prev_e = eps[j];
    prev_v = v;
  }
  return 12.0 * lipschitz / std::sqrt(static_cast<double>(n)) * acc;
}

double d_S_diameter(const EvalMatrix& m, const std::vector<std::size_t>& rows) {
  double diam = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b) diam = std::max(diam, d_S(m, rows[a], rows[b]));
  return diam;
}

double dudley_for_rows(const EvalMatrix& m, const std::vector<std::size_t>& rows, double lipschitz, std::size_t n) {
  if (rows.size() <= 1) return 0.0;
  double diam = d_S_diameter(m, rows);
  if (diam == 0.0) return 0.0;
  auto grid = default_epsilon_grid(diam);
  std::vector<std::size_t> upper;
  for (double e : grid) upper.push_back(greedy_packing(m, MetricTag::dS, e, &rows).size());
  return dudley_integral(grid, upper, rows.size(), lipschitz, n);
}

}  // namespace depthlab
