#include "depthlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/homdim.hpp"
#include "depthlab/rademacher.hpp"
#include "depthlab/regime.hpp"

namespace depthlab {

namespace {

struct Check {
  bool pass = true;
  std::string detail;
  std::string csv;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

ExperimentConfig config_for(const std::string& preset, const VerifyOptions& opts) {
  auto it = opts.preset_overrides.find(preset);
  ExperimentConfig c = it == opts.preset_overrides.end() ? preset_config(preset) : config_from_json(it->second);
  c.threads = opts.threads;
  return c;
}

std::uint64_t pow2(int k) { return std::uint64_t{1} << k; }

Check shear_exact(const VerifyOptions& opts) {
  Check r;
  auto cfg = config_for("shear", opts);
  cfg.k_from = 1;
  cfg.k_to = 50;
  auto probes = make_probes(cfg.family, cfg.probes, cfg.k_to);
  auto ball = enumerate(cfg.family, cfg.k_to, cfg.strategy, cfg.cap, &probes);
  auto m = evaluate(cfg.family, ball, probes, nullptr, cfg.threads);
  double min_d = kNoStop;
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = a + 1; b < m.rows(); ++b) min_d = std::min(min_d, d_S(m, a, b));
  if (!(min_d > 0.0)) {
    r.pass = false;
    r.detail = "two representatives coincide under d_S";
    return r;
  }
  cfg.epsilons = {0.49 * min_d};
  auto run = run_growth(cfg);
  std::size_t bad = 0;
  for (const auto& c : run.profile.cells)
    if (c.bracket.lower != static_cast<std::size_t>(1 + c.k) || c.bracket.upper != static_cast<std::size_t>(1 + c.k))
      ++bad;
  r.pass = bad == 0 && run.profile.cells.size() == 50;
  r.detail = "min d_S " + fmt("%.6g", min_d) + ", eps " + fmt("%.6g", cfg.epsilons[0]) + ", " +
             std::to_string(bad) + " of " + std::to_string(run.profile.cells.size()) + " depths off 1+k";
  r.csv = run.csv;
  return r;
}

Check cantor_saturation(const VerifyOptions& opts) {
  Check r;
  auto cfg = config_for("cantor", opts);
  cfg.k_from = 1;
  cfg.k_to = 12;
  cfg.epsilons = {0.2, 0.05};
  auto run = run_growth(cfg);
  for (double eps : cfg.epsilons) {
    int m = static_cast<int>(std::ceil(std::log(2.0 / eps) / std::log(3.0) - 1e-12));
    auto cells = run.profile.at_epsilon(eps);
    std::size_t ref = 0;
    bool ok = false;
    for (const auto& c : cells)
      if (c.k == m) {
        ref = c.bracket.upper;
        ok = true;
      }
    for (const auto& c : cells)
      if (c.k >= m && c.bracket.upper != ref) ok = false;
    r.pass = r.pass && ok;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("eps ") + format_double(eps) + ": m=" +
                std::to_string(m) + " upper " + std::to_string(ref) + (ok ? " constant" : " not constant");
  }
  r.csv = run.csv;
  return r;
}

Check exponential_lower(const std::string& preset, double eps, const VerifyOptions& opts) {
  Check r;
  auto cfg = config_for(preset, opts);
  cfg.k_from = 1;
  cfg.k_to = 12;
  cfg.epsilons = {eps};
  cfg.words = WordSet::Sphere;
  auto run = run_growth(cfg);
  int first_bad = -1;
  for (const auto& c : run.profile.cells)
    if (c.bracket.lower != pow2(c.k) && first_bad < 0) first_bad = c.k;
  r.pass = first_bad < 0 && run.profile.cells.size() == 12;
  r.detail = first_bad < 0 ? "lower = 2^k for k = 1..12"
                           : "lower != 2^k at k=" + std::to_string(first_bad);
  r.csv = run.csv;
  return r;
}

Check heisenberg_degree(const VerifyOptions& opts) {
  Check r;
  auto cfg = config_for("heisenberg", opts);
  cfg.k_from = 1;
  cfg.k_to = 30;
  cfg.epsilons = {0.05};
  auto run = run_growth(cfg);
  auto g = classify_growth(run.profile, 0.05);
  r.pass = g.kind == GrowthClass::Kind::Polynomial && g.degree >= 3.0 && g.degree <= 5.0;
  r.detail = growth_kind_name(g.kind) + " degree " + fmt("%.4f", g.degree) + " r2 " + fmt("%.4f", g.r2);
  r.csv = run.csv + "#class," + growth_class_to_json(g).dump() + "\n";
  return r;
}

std::vector<std::uint8_t> random_symbols(std::mt19937_64& rng, int alphabet, std::size_t len) {
  std::vector<std::uint8_t> s(len);
  for (auto& c : s) c = static_cast<std::uint8_t>(rng() % static_cast<std::uint64_t>(alphabet + 1));
  return s;
}

Point random_point(const Space& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (const auto* iv = std::get_if<Interval>(&s)) return iv->lo + (iv->hi - iv->lo) * u(rng);
  if (const auto* t = std::get_if<Torus>(&s)) {
    std::vector<double> x(static_cast<std::size_t>(t->dim));
    for (auto& c : x) c = wrap_unit(u(rng));
    return x;
  }
  if (std::holds_alternative<Circle>(s)) return std::vector<double>{wrap_unit(u(rng))};
  if (const auto* e = std::get_if<EuclideanBounded>(&s)) {
    std::vector<double> x(static_cast<std::size_t>(e->dim));
    for (auto& c : x) c = u(rng) - 0.5;
    return x;
  }
  if (const auto* sub = std::get_if<Subshift>(&s)) {
    auto prefix = random_symbols(rng, sub->alphabet, rng() % 7);
    auto tail = static_cast<std::uint8_t>(rng() % static_cast<std::uint64_t>(sub->alphabet + 1));
    return make_subshift_point(std::move(prefix), tail);
  }
  const auto& fg = std::get<FreeGroup>(s);
  std::vector<std::int16_t> letters(rng() % 7);
  for (auto& l : letters) {
    auto g = static_cast<std::int16_t>(1 + rng() % static_cast<std::uint64_t>(fg.rank));
    l = rng() % 2 ? g : static_cast<std::int16_t>(-g);
  }
  return free_reduce(letters);
}

std::vector<Space> cloud_spaces() {
  return {Interval{0.0, 1.0}, Torus{2}, EuclideanBounded{3}, Circle{}, Subshift{3, 0.5}, FreeGroup{2, 16}};
}

Check bracket_oracle(const VerifyOptions& opts) {
  Check r;
  std::mt19937_64 rng(opts.seed ^ 0x7A11);
  const auto spaces = cloud_spaces();
  std::size_t inside = 0, clouds = 200;
  std::ostringstream csv;
  csv << "cloud,space,points,metric,epsilon,lower,exact,upper\n";
  for (std::size_t c = 0; c < clouds; ++c) {
    const Space& s = spaces[c % spaces.size()];
    std::size_t npts = 1 + rng() % 12;
    std::vector<Point> pts;
    for (std::size_t i = 0; i < npts; ++i) pts.push_back(random_point(s, rng));
    auto m = EvalMatrix::from_points(s, pts);
    MetricTag tag = rng() % 2 ? MetricTag::dS : MetricTag::dPmax;
    double scale = std::holds_alternative<FreeGroup>(s) ? 6.0 : 0.6;
    double eps = scale * (0.02 + 0.98 * std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    auto br = covering_bracket(m, tag, eps);
    bool ok = br.exact && br.lower <= *br.exact && *br.exact <= br.upper;
    if (ok) ++inside;
    csv << c << ',' << space_kind(s) << ',' << npts << ',' << metric_name(tag) << ',' << format_double(eps) << ','
        << br.lower << ',' << (br.exact ? std::to_string(*br.exact) : "") << ',' << br.upper << '\n';
  }

  // Axioms on 1000 random triples per space: pointwise distance and the
  // empirical distances between rows of random images.
  std::size_t violations = 0;
  csv << "space,triples,violations\n";
  for (const auto& s : spaces) {
    std::size_t bad = 0;
    const bool ultra = std::holds_alternative<Subshift>(s);
    const double tol = 1e-12;
    for (int t = 0; t < 1000; ++t) {
      Point x = random_point(s, rng), y = random_point(s, rng), z = random_point(s, rng);
      double xy = distance(s, x, y), yx = distance(s, y, x), yz = distance(s, y, z), xz = distance(s, x, z);
      if (distance(s, x, x) != 0.0 || xy != yx || xy < 0.0) ++bad;
      if (xz > xy + yz + tol) ++bad;
      if (ultra && xz > std::max(xy, yz) + tol) ++bad;

      EvalMatrix m(s, 4, 8);
      for (int row = 0; row < 3; ++row) {
        std::vector<Point> img;
        for (int i = 0; i < 4; ++i) img.push_back(random_point(s, rng));
        m.append_points(img);
      }
      for (MetricTag tag : {MetricTag::dS, MetricTag::dPmax}) {
        double a = row_distance(m, tag, 0, 1), b = row_distance(m, tag, 1, 2), ac = row_distance(m, tag, 0, 2);
        if (row_distance(m, tag, 1, 1) != 0.0 || row_distance(m, tag, 1, 0) != a) ++bad;
        if (ac > a + b + tol) ++bad;
        if (ultra && tag == MetricTag::dPmax && ac > std::max(a, b) + tol) ++bad;
      }
    }
    violations += bad;
    csv << space_kind(s) << ",1000," << bad << '\n';
  }
  r.pass = inside == clouds && violations == 0;
  r.detail = std::to_string(inside) + "/" + std::to_string(clouds) + " exact covers inside the bracket, " +
             std::to_string(violations) + " axiom violations";
  r.csv = csv.str();
  return r;
}

Check massart(const VerifyOptions& opts) {
  Check r;
  std::mt19937_64 rng(opts.seed ^ 0x3A55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::ostringstream csv;
  csv << "case,n,size,estimate,stderr,massart\n";
  std::size_t dominated = 0;
  for (int c = 0; c < 50; ++c) {
    std::size_t size = 1 + rng() % 256;
    FiniteClassValues v(64);
    std::vector<double> row(64);
    for (std::size_t h = 0; h < size; ++h) {
      for (auto& x : row) x = u(rng);
      v.add_row(row);
    }
    auto e = empirical_rademacher(v, kDefaultDraws, opts.seed + static_cast<std::uint64_t>(c), opts.threads);
    double mb = massart_bound(1.0, size, 64);
    if (e.mean - 3.0 * e.std_error <= mb) ++dominated;
    csv << c << ",64," << size << ',' << format_double(e.mean) << ',' << format_double(e.std_error) << ','
        << format_double(mb) << '\n';
  }
  std::size_t matched = 0, small = 0;
  csv << "n,size,estimate,stderr,exact\n";
  for (std::size_t n = 4; n <= kExactSignLimit; ++n, ++small) {
    std::size_t size = 2 + rng() % 31;
    FiniteClassValues v(n);
    std::vector<double> row(n);
    for (std::size_t h = 0; h < size; ++h) {
      for (auto& x : row) x = u(rng);
      v.add_row(row);
    }
    auto e = empirical_rademacher(v, kDefaultDraws, opts.seed + 1000 + n, opts.threads);
    double ex = exact_rademacher(v);
    if (std::fabs(e.mean - ex) <= 3.0 * e.std_error) ++matched;
    csv << n << ',' << size << ',' << format_double(e.mean) << ',' << format_double(e.std_error) << ','
        << format_double(ex) << '\n';
  }
  r.pass = dominated == 50 && matched == small;
  r.detail = std::to_string(dominated) + "/50 classes under the Massart bound, " + std::to_string(matched) + "/" +
             std::to_string(small) + " Monte Carlo estimates within 3 stderr of exact";
  r.csv = csv.str();
  return r;
}

// Linear readouts x -> w . phi(x) on the images of a word ball, against the
// readouts alone plus the Dudley term of the ball.
Check hidden_output(const VerifyOptions& opts) {
  Check r;
  std::ostringstream csv;
  csv << "family,k,representatives,composite,readout,dudley\n";
  const std::size_t n = 64;
  std::size_t held = 0, total = 0;

  auto run = [&](const std::string& name, const Family& f, const Strategy& strategy, const ProbeSet& probes,
                 const std::vector<std::vector<double>>& weights, const std::function<double(double)>& phi,
                 double lipschitz) {
    const std::size_t dim = static_cast<std::size_t>(space_dim(f.space));
    auto readout_class = [&](const std::vector<std::vector<double>>& images) {
      FiniteClassValues v(n);
      std::vector<double> row(n);
      for (const auto& img : images)
        for (const auto& w : weights) {
          for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t a = 0; a < dim; ++a) s += w[a] * phi(img[a * n + i]);
            row[i] = s;
          }
          v.add_row(row);
        }
      return v;
    };
    std::vector<double> raw(dim * n);
    for (std::size_t i = 0; i < n; ++i) {
      if (const auto* x = std::get_if<double>(&probes.points[i]))
        raw[i] = *x;
      else
        for (std::size_t a = 0; a < dim; ++a) raw[a * n + i] = std::get<std::vector<double>>(probes.points[i])[a];
    }
    auto rh = empirical_rademacher(readout_class({raw}), kDefaultDraws, opts.seed, opts.threads);
    for (int k = 1; k <= 8; ++k) {
      auto ball = enumerate(f, k, strategy, kDefaultCap, &probes);
      auto m = evaluate(f, ball, probes, nullptr, opts.threads);
      std::vector<std::vector<double>> images;
      std::vector<std::size_t> rows;
      for (std::size_t row = 0; row < m.rows(); ++row) {
        images.emplace_back(m.real_row(row), m.real_row(row) + m.real_stride());
        rows.push_back(row);
      }
      auto comp = empirical_rademacher(readout_class(images), kDefaultDraws, opts.seed, opts.threads);
      double dudley = dudley_for_rows(m, rows, lipschitz, n);
      ++total;
      if (comp.mean <= rh.mean + dudley) ++held;
      csv << name << ',' << k << ',' << m.rows() << ',' << format_double(comp.mean) << ',' << format_double(rh.mean)
          << ',' << format_double(dudley) << '\n';
    }
  };

  auto cantor = family_preset("cantor");
  std::vector<std::vector<double>> w1;
  for (int j = -4; j <= 4; ++j) w1.push_back({0.25 * j});
  run("cantor", cantor, WordEnum{}, random_probes(cantor.space, static_cast<int>(n), opts.seed), w1,
      [](double x) { return x; }, 1.0);

  // sin(2 pi x) / (2 pi) is 1-Lipschitz and well defined on the circle.
  auto shear = family_preset("shear");
  std::vector<std::vector<double>> w2;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) w2.push_back({double(a), double(b)});
  const double two_pi = 2.0 * std::acos(-1.0);
  run("shear", shear, CanonicalBFS{}, random_probes(shear.space, static_cast<int>(n), opts.seed + 1), w2,
      [two_pi](double x) { return std::sin(two_pi * x) / two_pi; }, std::sqrt(2.0));

  r.pass = held == total;
  r.detail = std::to_string(held) + "/" + std::to_string(total) + " configurations satisfy the decomposition";
  r.csv = csv.str();
  return r;
}

// Threshold classifiers on uniform inputs with 10% label noise.
Check uniform_deviation(const VerifyOptions& opts) {
  Check r;
  const std::size_t n = 200, datasets = 500, thresholds = 21;
  const double delta = 0.1, noise = 0.1;
  std::mt19937_64 rng(opts.seed ^ 0xDE71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  std::ostringstream csv;
  csv << "dataset,deviation,bound\n";
  std::vector<double> xs(n);
  std::vector<int> ys(n);
  for (std::size_t d = 0; d < datasets; ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = u(rng);
      ys[i] = (xs[i] >= 0.5) != (u(rng) < noise);
    }
    FiniteClassValues loss(n);
    std::vector<double> row(n);
    double deviation = -1.0;
    for (std::size_t j = 0; j < thresholds; ++j) {
      double t = static_cast<double>(j) / static_cast<double>(thresholds - 1);
      double emp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        row[i] = static_cast<double>((xs[i] >= t) != (ys[i] == 1));
        emp += row[i];
      }
      emp /= static_cast<double>(n);
      double risk = noise + (1.0 - 2.0 * noise) * std::fabs(t - 0.5);
      deviation = std::max(deviation, std::fabs(risk - emp));
      loss.add_row(row);
    }
    auto e = empirical_rademacher(loss, 256, opts.seed + d, opts.threads);
    double bound = uniform_deviation_bound(e.mean, 1.0, delta, n, 1.0);
    if (deviation > bound) ++violations;
    csv << d << ',' << format_double(deviation) << ',' << format_double(bound) << '\n';
  }
  double freq = static_cast<double>(violations) / static_cast<double>(datasets);
  r.pass = freq <= 0.12;
  r.detail = "violation frequency " + format_double(freq) + " over " + std::to_string(datasets) + " datasets";
  r.csv = csv.str();
  return r;
}

Check regime(const VerifyOptions&) {
  Check r;
  std::ostringstream csv;
  const double alpha = 1.0, beta = 2.0, gamma = 1.0;

  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    double x = std::pow(10.0, -6.0 + 18.0 * i / 2000.0);
    double w = lambert_w0(x);
    worst = std::max(worst, std::fabs(w * std::exp(w) - x) / std::max(1.0, x));
  }
  bool a = worst <= 1e-12;

  const std::vector<double> ns = {1e3, 1e4, 1e5, 1e6, 1e7};
  csv << "regime,n,k_closed,k_numeric,gen_closed,gen_numeric\n";
  std::vector<double> lx, ly;
  bool c = true, d = true, e = true;
  double worst_gap = 0.0;
  for (double n : ns) {
    double gen[4];
    for (Regime rg : {Regime::EL, Regime::EP, Regime::PL, Regime::PP}) {
      BiasModel bm;
      VarModel vm;
      models_for(rg, alpha, beta, gamma, bm, vm);
      auto s = optimal_depth(bm, vm, n);
      gen[static_cast<int>(rg)] = s.gen_at_star;
      double gap = s.gen_closed / s.gen_at_star - 1.0;
      worst_gap = std::max(worst_gap, gap);
      if (gap > 0.05) c = false;
      if (!(s.k_star_numeric > 1.0)) d = false;
      if (rg == Regime::PP) {
        lx.push_back(std::log(n));
        ly.push_back(std::log(s.k_star_numeric));
      }
      csv << regime_name(rg) << ',' << format_double(n) << ',' << format_double(s.k_star_closed) << ','
          << format_double(s.k_star_numeric) << ',' << format_double(s.gen_closed) << ','
          << format_double(s.gen_at_star) << '\n';
    }
    const int EL = 0, EP = 1, PL = 2, PP = 3;
    if (n >= 1e4 && !(gen[EL] <= gen[EP] && gen[EP] <= gen[PL] && gen[PL] <= gen[PP])) e = false;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  double slope = sxy / sxx, target = 1.0 / (2.0 * beta + gamma);
  bool b = std::fabs(slope - target) <= 0.1 * target;

  r.pass = a && b && c && d && e;
  r.detail = std::string("(a) ") + (a ? "ok" : "FAIL") + " max residual " + fmt("%.2e", worst) + "; (b) " +
             (b ? "ok" : "FAIL") + " PP slope " + fmt("%.4f", slope) + "; (c) " + (c ? "ok" : "FAIL") +
             " worst closed-form gen excess " + fmt("%.1f%%", 100.0 * worst_gap) + "; (d) " + (d ? "ok" : "FAIL") +
             "; (e) " + (e ? "ok" : "FAIL") + " ordering EL<=EP<=PL<=PP";
  csv << "#lambert_max_residual," << format_double(worst) << "\n#pp_slope," << format_double(slope) << '\n';
  r.csv = csv.str();
  return r;
}

Check homdim_exact(const VerifyOptions&) {
  Check r;
  std::ostringstream csv;
  csv << "group,dimension,expected\n";
  std::size_t bad = 0;
  auto expect = [&](const std::string& name, std::int64_t got, std::int64_t want) {
    if (got != want) ++bad;
    csv << name << ',' << got << ',' << want << '\n';
  };
  expect("layers(2,1)", homogeneous_dimension({2, 1}), 4);
  expect("layers(4,1)", homogeneous_dimension({4, 1}), 6);
  expect("UT(3)", homogeneous_dimension(ut_layers(3)), 4);
  expect("UT(4)", homogeneous_dimension(ut_layers(4)), 10);
  for (std::int64_t n = 2; n <= 50; ++n)
    expect("UT(" + std::to_string(n) + ")", homogeneous_dimension(ut_layers(static_cast<int>(n))),
           n * (n - 1) * (n + 1) / 6);
  for (std::int64_t d = 1; d <= 5; ++d) expect("R|xR^" + std::to_string(d) + " diagonal", solvable_dimension({d}), 1 + d);
  expect("blocks(0,1)", solvable_dimension({0, 1}), 4);
  expect("blocks(0,0,1)", solvable_dimension({0, 0, 1}), 7);
  expect("blocks(2,1)", solvable_dimension({2, 1}), 6);
  r.pass = bad == 0;
  r.detail = std::to_string(bad) + " mismatches";
  r.csv = csv.str();
  return r;
}

Check e3_bound(const VerifyOptions& opts) {
  Check r;
  auto cfg = config_for("e3", opts);
  auto probes = make_probes(cfg.family, cfg.probes, 0);
  std::ostringstream csv;
  csv << "k,epsilon,words,bound,direct\n";

  // Precondition: three writers, pairwise 0.5 apart on the probes, and lambda = 2.
  std::vector<std::vector<Point>> writers;
  double lambda = 0.0;
  for (const auto& g : cfg.family.generators) {
    if (const auto* e = std::get_if<Expand>(&g)) lambda = e->lambda;
    if (!std::holds_alternative<Writer>(g)) continue;
    std::vector<Point> img;
    for (const auto& p : probes.points) img.push_back(apply(cfg.family.space, g, p));
    writers.push_back(std::move(img));
  }
  bool setup = writers.size() == 3 && lambda == 2.0;
  for (std::size_t a = 0; setup && a < writers.size(); ++a)
    for (std::size_t b = a + 1; b < writers.size(); ++b) {
      double dmax = 0.0;
      for (std::size_t i = 0; i < probes.points.size(); ++i)
        dmax = std::max(dmax, distance(cfg.family.space, writers[a][i], writers[b][i]));
      if (std::fabs(dmax - 0.5) > 1e-12) setup = false;
    }

  bool ok = setup;
  std::string counts;
  for (int k = 1; k <= 3; ++k) {
    auto e = run_e3(cfg.family, k, 0.2, probes, cfg.metric);
    if (e.direct < e.bound) ok = false;
    csv << k << ",0.2," << e.words << ',' << e.bound << ',' << e.direct << '\n';
    counts += (counts.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + " " + std::to_string(e.direct) +
              ">=" + std::to_string(e.bound);
  }
  r.pass = ok;
  r.detail = (setup ? "" : "writer set is not three writers 0.5 apart with lambda 2; ") + counts;
  r.csv = csv.str();
  return r;
}

// Runtime limits in seconds, 0 for none.
double time_limit(int id) {
  switch (id) {
    case 1: return 2.0;
    case 2: return 5.0;
    case 3: return 30.0;
    case 4: return 30.0;
    case 5: return 10.0;
    case 6: return 60.0;
    case 12: return 1.0;
    default: return 0.0;
  }
}

Check dispatch(int id, const VerifyOptions& opts) {
  switch (id) {
    case 1: return shear_exact(opts);
    case 2: return cantor_saturation(opts);
    case 3: return exponential_lower("pingpong-pl", 0.1, opts);
    case 4: return exponential_lower("subshift", 0.4, opts);
    case 5: return exponential_lower("free2", 0.9, opts);
    case 6: return heisenberg_degree(opts);
    case 7: return bracket_oracle(opts);
    case 8: return massart(opts);
    case 9: return hidden_output(opts);
    case 10: return uniform_deviation(opts);
    case 11: return regime(opts);
    case 12: return homdim_exact(opts);
    case 13: return e3_bound(opts);
    default: throw PreconditionError("no criterion " + std::to_string(id));
  }
}

CriterionResult timed(int id, const VerifyOptions& opts) {
  CriterionResult res;
  res.id = id;
  res.name = criterion_name(id);
  auto t0 = std::chrono::steady_clock::now();
  try {
    Check c = dispatch(id, opts);
    res.pass = c.pass;
    res.detail = c.detail;
    res.csv = c.csv;
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds = seconds_since(t0);
  double limit = time_limit(id);
  if (limit > 0.0 && res.seconds >= limit) {
    res.pass = false;
    res.detail += "; runtime " + fmt("%.2f", res.seconds) + " s over the " + fmt("%g", limit) + " s limit";
  }
  return res;
}

CriterionResult determinism(const VerifyOptions& opts, const std::vector<CriterionResult>& first_pass) {
  CriterionResult res;
  res.id = 14;
  res.name = criterion_name(14);
  auto t0 = std::chrono::steady_clock::now();
  VerifyOptions alt = opts;
  alt.threads = opts.threads == 1 ? 2 : 1;
  std::vector<int> differing;
  std::ostringstream csv;
  csv << "criterion,bytes,identical\n";
  for (int id = 1; id < 14; ++id) {
    std::string a;
    auto it = std::find_if(first_pass.begin(), first_pass.end(), [&](const auto& r) { return r.id == id; });
    a = it != first_pass.end() ? it->csv : timed(id, opts).csv;
    std::string b = timed(id, alt).csv;
    bool same = !a.empty() && a == b;
    if (!same) differing.push_back(id);
    csv << id << ',' << a.size() << ',' << (same ? 1 : 0) << '\n';
  }
  res.pass = differing.empty();
  if (differing.empty()) {
    res.detail = "criteria 1-13 reproduce byte-identical CSV with " + std::to_string(alt.threads) + " thread(s)";
  } else {
    res.detail = "CSV differs or is empty for criteria";
    for (int id : differing) res.detail += " " + std::to_string(id);
  }
  res.csv = csv.str();
  res.seconds = seconds_since(t0);
  return res;
}

}  // namespace

std::string criterion_name(int id) {
  static const char* names[] = {"shear-exact-count",     "cantor-saturation",    "pingpong-exponential",
                                "subshift-exponential",  "free-group-exponential", "heisenberg-degree",
                                "bracket-vs-exact",      "massart-dominance",    "hidden-output-decomposition",
                                "uniform-deviation",     "regime-solver",        "homogeneous-dimension",
                                "e3-multiplicative",     "determinism"};
  if (id < 1 || id > kCriterionCount) throw PreconditionError("no criterion " + std::to_string(id));
  return names[id - 1];
}

std::vector<int> parse_filter(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("bad criterion id '" + s + "' in filter '" + text + "'");
    if (v < 1 || v > kCriterionCount)
      throw ConfigError("criterion id " + s + " out of range 1-" + std::to_string(kCriterionCount));
    return v;
  };
  while (std::getline(ss, part, ',')) {
    auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(number(part));
    } else {
      int lo = number(part.substr(0, dash)), hi = number(part.substr(dash + 1));
      if (lo > hi) throw ConfigError("empty range '" + part + "' in filter");
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    }
  }
  if (out.empty()) throw ConfigError("empty criterion filter");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  if (id == 14) return determinism(opts, {});
  return timed(id, opts);
}

std::vector<CriterionResult> run_verify(const VerifyOptions& opts) {
  std::vector<int> ids = opts.filter;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    criterion_name(id);
    out.push_back(id == 14 ? determinism(opts, out) : timed(id, opts));
  }
  return out;
}

std::string verify_report(const std::vector<CriterionResult>& results) {
  std::string out;
  std::size_t passed = 0;
  for (const auto& r : results) {
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d %-28s %8.2fs  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds);
    out += head + r.detail + "\n";
    if (r.pass) ++passed;
  }
  out += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
  return out;
}

std::string verify_csv(const std::vector<CriterionResult>& results) {
  std::string out;
  for (const auto& r : results) out += "#criterion," + std::to_string(r.id) + "," + r.name + "\n" + r.csv;
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

}  // namespace depthlab
