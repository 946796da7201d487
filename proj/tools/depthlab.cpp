#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/homdim.hpp"
#include "depthlab/rademacher.hpp"
#include "depthlab/regime.hpp"
#include "depthlab/verify.hpp"

using namespace depthlab;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c, const std::string& default_format) {
  c.format = default_format;
  app->add_option("--config", c.config, "experiment config (JSON)");
  app->add_option("--preset", c.preset, "embedded preset name");
  app->add_option("--seed", c.seed, "seed for randomized steps");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "write output here instead of stdout");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text);
}

ExperimentConfig load(const Common& c) {
  if (!c.config.empty() && !c.preset.empty()) throw ConfigError("give either --config or --preset, not both");
  if (c.config.empty() && c.preset.empty()) throw ConfigError("one of --config or --preset is required");
  ExperimentConfig cfg = c.config.empty() ? preset_config(c.preset) : load_config(c.config);
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.probes.seed = *c.seed;
  }
  cfg.threads = c.threads;
  return cfg;
}

json profile_json(const GrowthProfile& p, const std::string& hash) {
  json cells = json::array();
  for (const auto& c : p.cells)
    cells.push_back({{"k", c.k},
                     {"epsilon", c.epsilon},
                     {"lower", c.bracket.lower},
                     {"upper", c.bracket.upper},
                     {"exact", c.bracket.exact ? json(*c.bracket.exact) : json(nullptr)},
                     {"cap_exceeded", c.cap_exceeded}});
  return {{"config_hash", hash}, {"version", DEPTHLAB_VERSION}, {"family", p.family},   {"strategy", p.strategy},
          {"metric", metric_name(p.metric)}, {"probes", p.probes}, {"cells", cells}};
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw ConfigError("bad number '" + part + "' in list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<std::int64_t> parse_integers(const std::string& text) {
  std::vector<std::int64_t> out;
  for (double v : parse_numbers(text)) {
    if (v != std::floor(v) || std::fabs(v) > 9e15) throw ConfigError("expected integers in '" + text + "'");
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

FiniteClassValues read_values(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      rows.push_back(parse_numbers(line));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (rows.empty()) throw PreconditionError(path + ": empty class");
  return FiniteClassValues(rows);
}

int cmd_growth(const Common& c) {
  auto cfg = load(c);
  auto run = run_growth(cfg);
  emit(c, c.format == "json" ? profile_json(run.profile, config_hash(cfg)).dump(2) + "\n" : run.csv);
  return 0;
}

int cmd_classify(const Common& c, const std::string& profile_path, std::optional<double> eps) {
  GrowthProfile p;
  if (!profile_path.empty())
    p = profile_from_csv(read_file(profile_path));
  else
    p = run_growth(load(c)).profile;
  if (p.cells.empty()) throw InsufficientData("profile has no cells");
  double e = eps ? *eps : p.cells.front().epsilon;
  emit(c, growth_class_to_json(classify_growth(p, e)).dump(2) + "\n");
  return 0;
}

int cmd_dudley(const Common& c, std::optional<int> k_opt, double lipschitz, std::optional<std::size_t> n_opt) {
  auto cfg = load(c);
  int k = k_opt ? *k_opt : cfg.k_to;
  if (k < 0) throw PreconditionError("k must be nonnegative");
  auto probes = make_probes(cfg.family, cfg.probes, k);
  auto ball = enumerate(cfg.family, k, cfg.strategy, cfg.cap, &probes);
  auto rows = cfg.words == WordSet::Ball ? ball.ball_rows(k) : ball.layer(k);
  auto m = evaluate(cfg.family, ball, probes, &rows, cfg.threads);
  std::vector<std::size_t> all(m.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::size_t n = n_opt ? *n_opt : probes.points.size();
  if (n == 0) throw PreconditionError("n must be positive");
  double diam = d_S_diameter(m, all);
  std::vector<double> grid;
  std::vector<std::size_t> upper;
  if (diam > 0.0) {
    grid = default_epsilon_grid(diam);
    for (double e : grid) upper.push_back(greedy_packing(m, MetricTag::dS, e, &all).size());
  }
  double value = grid.empty() ? 0.0 : dudley_integral(grid, upper, all.size(), lipschitz, n);
  if (c.format == "csv") {
    std::string out = "#config-hash," + config_hash(cfg) + "\n#version," + DEPTHLAB_VERSION + "\nepsilon,upper\n";
    for (std::size_t i = 0; i < grid.size(); ++i) out += format_double(grid[i]) + "," + std::to_string(upper[i]) + "\n";
    out += "#dudley," + format_double(value) + "\n";
    emit(c, out);
  } else {
    json g = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) g.push_back({{"epsilon", grid[i]}, {"upper", upper[i]}});
    emit(c, json{{"family", cfg.family.name},
                 {"k", k},
                 {"representatives", all.size()},
                 {"diameter", diam},
                 {"lipschitz", lipschitz},
                 {"n", n},
                 {"grid", g},
                 {"dudley", value}}
                    .dump(2) +
                "\n");
  }
  return 0;
}

struct RademacherArgs {
  std::string values;
  std::size_t draws = kDefaultDraws;
  double dudley = 0.0;
  double entropy_h = 0.0;
  double entropy_f = 0.0;
  double lipschitz = 1.0;
};

int cmd_rademacher(const Common& c, const RademacherArgs& a) {
  if (a.values.empty()) throw ConfigError("--values is required");
  auto v = read_values(a.values);
  if (v.n() > kExactSignLimit && !c.seed) throw ConfigError("--seed is required for a Monte Carlo estimate");
  if (a.draws == 0) throw PreconditionError("draws must be positive");
  auto e = rademacher_complexity(v, a.draws, c.seed.value_or(0), c.threads);
  RademacherBounds b;
  b.massart = massart_bound(v.bound(), v.size(), v.n());
  b.hidden_output = hidden_output_bound(e.mean, a.dudley);
  b.two_integral = two_integral_bound(a.entropy_h, a.entropy_f, a.lipschitz, v.n(), v.bound());
  emit(c, rademacher_report(e, b).dump(2) + "\n");
  return 0;
}

struct DepthArgs {
  std::string regime;
  double alpha = 1.0, beta = 2.0, gamma = 1.0;
  std::optional<double> n;
  std::string n_grid;
  bool fig3 = false;
  int k_max = 40;
};

int cmd_optimal_depth(const Common& c, const DepthArgs& a) {
  if (a.fig3) {
    double n = a.n.value_or(1e4);
    if (a.k_max < 1) throw PreconditionError("--k-max must be at least 1");
    std::vector<double> ks;
    for (int k = 1; k <= a.k_max; ++k) ks.push_back(k);
    std::string out = "#version," DEPTHLAB_VERSION "\nregime,k,bias,var,gen\n";
    json curves = json::object();
    for (Regime r : {Regime::EL, Regime::EP, Regime::PL, Regime::PP}) {
      BiasModel b;
      VarModel v;
      models_for(r, a.alpha, a.beta, a.gamma, b, v);
      json pts = json::array();
      for (const auto& p : generalization_curve(b, v, n, ks)) {
        out += regime_name(r) + "," + format_double(p.k) + "," + format_double(p.bias) + "," + format_double(p.var) +
               "," + format_double(p.gen) + "\n";
        pts.push_back({{"k", p.k}, {"bias", p.bias}, {"var", p.var}, {"gen", p.gen}});
      }
      curves[regime_name(r)] = pts;
    }
    emit(c, c.format == "json" ? json{{"n", n}, {"curves", curves}}.dump(2) + "\n" : out);
    return 0;
  }
  if (a.regime.empty()) throw ConfigError("--regime is required (EL, EP, PL or PP)");
  Regime r = regime_from_name(a.regime);
  std::vector<double> ns;
  if (!a.n_grid.empty()) ns = parse_numbers(a.n_grid);
  if (a.n) ns.insert(ns.begin(), *a.n);
  if (ns.empty()) throw ConfigError("give --n or --n-grid");
  BiasModel b;
  VarModel v;
  models_for(r, a.alpha, a.beta, a.gamma, b, v);
  std::vector<DepthSolution> sols;
  for (double n : ns) sols.push_back(optimal_depth(b, v, n));
  if (c.format == "json") {
    json out = json::array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
      json j = depth_solution_to_json(sols[i]);
      j["n"] = ns[i];
      out.push_back(j);
    }
    emit(c, (sols.size() == 1 ? out[0] : out).dump(2) + "\n");
  } else {
    std::string out = "#version," DEPTHLAB_VERSION "\nregime,n,k_star_closed,k_star_numeric,gen_closed,gen_at_star,form\n";
    for (std::size_t i = 0; i < sols.size(); ++i)
      out += regime_name(r) + "," + format_double(ns[i]) + "," + format_double(sols[i].k_star_closed) + "," +
             format_double(sols[i].k_star_numeric) + "," + format_double(sols[i].gen_closed) + "," +
             format_double(sols[i].gen_at_star) + "," + sols[i].form + "\n";
    emit(c, out);
  }
  return 0;
}

int cmd_homdim(const Common& c, const std::string& layers, std::optional<int> ut, const std::string& solvable) {
  int given = !layers.empty() + static_cast<int>(ut.has_value()) + !solvable.empty();
  if (given != 1) throw ConfigError("give exactly one of --layers, --ut, --solvable");
  json out;
  if (!layers.empty()) {
    auto l = parse_integers(layers);
    out = homdim_report("graded(" + layers + ")", l);
  } else if (ut) {
    out = homdim_report("UT(" + std::to_string(*ut) + ")", ut_layers(*ut));
  } else {
    auto counts = parse_integers(solvable);
    out = {{"group", "R|x R^n blocks(" + solvable + ")"}, {"layers", counts}, {"dimension", solvable_dimension(counts)}};
  }
  emit(c, out.dump() + "\n");
  return 0;
}

int cmd_verify(const Common& c, const std::string& filter) {
  VerifyOptions opts;
  if (!filter.empty()) opts.filter = parse_filter(filter);
  opts.threads = c.threads;
  if (c.seed) opts.seed = *c.seed;
  if (!c.preset.empty() || !c.config.empty()) {
    auto cfg = load(c);
    opts.preset_overrides[cfg.preset.empty() ? c.preset : cfg.preset] = config_to_json(cfg);
  }
  auto results = run_verify(opts);
  std::cout << verify_report(results);
  if (!c.out.empty()) write_file(c.out, verify_csv(results));
  return all_passed(results) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depth and word-ball growth experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DEPTHLAB_VERSION);

  Common growth_c, classify_c, dudley_c, rad_c, depth_c, homdim_c, verify_c;

  auto* growth = app.add_subcommand("growth", "covering-number profile of word balls");
  add_common(growth, growth_c, "csv");

  auto* classify = app.add_subcommand("classify", "growth class of a profile");
  add_common(classify, classify_c, "json");
  std::string profile_path;
  std::optional<double> classify_eps;
  classify->add_option("--profile", profile_path, "profile CSV written by growth");
  classify->add_option("--epsilon", classify_eps, "epsilon column to classify");

  auto* dudley = app.add_subcommand("dudley", "Dudley entropy integral of a word ball under d_S");
  add_common(dudley, dudley_c, "json");
  std::optional<int> dudley_k;
  double dudley_l = 1.0;
  std::optional<std::size_t> dudley_n;
  dudley->add_option("--k", dudley_k, "depth (default: end of the config k range)");
  dudley->add_option("--lipschitz", dudley_l, "Lipschitz constant of the readout class");
  dudley->add_option("--n", dudley_n, "sample size (default: number of probes)");

  auto* rad = app.add_subcommand("rademacher", "empirical Rademacher complexity of a finite class");
  add_common(rad, rad_c, "json");
  RademacherArgs ra;
  rad->add_option("--values", ra.values, "CSV of h(X_i), one hypothesis per line");
  rad->add_option("--draws", ra.draws, "sign draws");
  rad->add_option("--dudley", ra.dudley, "Dudley term for the hidden-output bound");
  rad->add_option("--entropy-h", ra.entropy_h, "entropy integral of the readout class");
  rad->add_option("--entropy-f", ra.entropy_f, "entropy integral of the hidden class");
  rad->add_option("--lipschitz", ra.lipschitz, "Lipschitz constant of the readouts");

  auto* depth = app.add_subcommand("optimal-depth", "bias-variance optimal depth");
  add_common(depth, depth_c, "json");
  DepthArgs da;
  depth->add_option("--regime", da.regime, "EL, EP, PL or PP");
  depth->add_option("--alpha", da.alpha, "exponential bias rate");
  depth->add_option("--beta", da.beta, "polynomial bias exponent");
  depth->add_option("--gamma", da.gamma, "polynomial variance exponent");
  depth->add_option("--n", da.n, "sample size");
  depth->add_option("--n-grid", da.n_grid, "comma separated sample sizes");
  depth->add_flag("--fig3", da.fig3, "emit the four regime curves");
  depth->add_option("--k-max", da.k_max, "last depth of the --fig3 curves");

  auto* homdim = app.add_subcommand("homdim", "homogeneous dimension of a graded nilpotent group");
  add_common(homdim, homdim_c, "json");
  std::string layers, solvable;
  std::optional<int> ut;
  homdim->add_option("--layers", layers, "layer dimensions, e.g. 2,1");
  homdim->add_option("--ut", ut, "unitriangular group UT(n)");
  homdim->add_option("--solvable", solvable, "Jordan block counts n_1,n_2,...");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify, verify_c, "csv");
  std::string filter;
  verify->add_option("--filter", filter, "criteria to run, e.g. 1,3-5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*growth) return cmd_growth(growth_c);
    if (*classify) return cmd_classify(classify_c, profile_path, classify_eps);
    if (*dudley) return cmd_dudley(dudley_c, dudley_k, dudley_l, dudley_n);
    if (*rad) return cmd_rademacher(rad_c, ra);
    if (*depth) return cmd_optimal_depth(depth_c, da);
    if (*homdim) return cmd_homdim(homdim_c, layers, ut, solvable);
    if (*verify) return cmd_verify(verify_c, filter);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
