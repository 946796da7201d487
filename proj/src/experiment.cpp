#include "depthlab/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "depthlab/errors.hpp"

namespace depthlab {

namespace {

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> p{
      {"shear", R"({"family": "shear", "strategy": {"kind": "canonical_bfs"}, "k_range": [1, 50],
                    "epsilons": [0.1], "probes": {"kind": "lattice", "n": 32}, "metric": "d_S"})"},
      {"cantor", R"({"family": "cantor", "strategy": {"kind": "word_enum", "tau": 1e-9}, "k_range": [1, 12],
                     "epsilons": [0.2, 0.05], "probes": {"kind": "grid", "n": 257}, "metric": "d_P_max"})"},
      {"heisenberg", R"({"family": "heisenberg", "strategy": {"kind": "canonical_bfs"}, "k_range": [1, 30],
                         "epsilons": [0.05], "probes": {"kind": "basepoint"}, "metric": "d_S"})"},
      {"pingpong-pl", R"({"family": "pingpong-pl", "strategy": {"kind": "word_enum", "tau": 1e-9},
                          "k_range": [1, 10], "epsilons": [0.1], "probes": {"kind": "extremal"},
                          "metric": "d_P_max", "words": "sphere"})"},
      {"subshift", R"({"family": "subshift", "strategy": {"kind": "word_enum", "tau": 1e-9}, "k_range": [1, 10],
                       "epsilons": [0.4], "probes": {"kind": "tail_padded"}, "metric": "d_P_max"})"},
      {"free2", R"({"family": "free2", "strategy": {"kind": "word_enum", "tau": 1e-9}, "k_range": [1, 12],
                    "epsilons": [0.9], "probes": {"kind": "basepoint"}, "metric": "d_P_max", "words": "sphere"})"},
      {"e3", R"({"family": "e3", "strategy": {"kind": "word_enum", "tau": 1e-9}, "k_range": [1, 4],
                 "epsilons": [0.2], "probes": {"kind": "random", "n": 16}, "metric": "d_P_max", "seed": 7})"},
  };
  return p;
}

int line_of_key(const std::string& text, const std::string& key) {
  auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Schema errors carry the offending key so the text parser can locate it.
struct KeyError : ConfigError {
  KeyError(const std::string& key, const std::string& msg) : ConfigError(msg), key(key) {}
  std::string key;
};

template <class F>
auto field(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const KeyError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw KeyError(key, "bad value for '" + key + "': " + e.what());
  } catch (const ConfigError& e) {
    throw KeyError(key, "bad value for '" + key + "': " + e.what());
  } catch (const PreconditionError& e) {
    throw KeyError(key, "bad value for '" + key + "': " + e.what());
  }
}

void apply_keys(ExperimentConfig& c, const nlohmann::json& j) {
  static const std::set<std::string> keys{"preset", "family",  "strategy", "k_range", "epsilons", "probes",
                                          "metric", "words",   "seed",     "cap",     "threads",  "output"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw KeyError(it.key(), "unknown key '" + it.key() + "'");
  if (j.contains("family")) {
    c.family = field("family", [&] {
      const auto& f = j["family"];
      if (f.is_string()) return family_preset(f.get<std::string>());
      Family fam = family_from_json(f);
      validate_family(fam);
      return fam;
    });
  }
  if (j.contains("strategy")) {
    c.strategy = field("strategy", [&]() -> Strategy {
      const auto& s = j["strategy"];
      if (!s.is_object()) throw ConfigError("strategy must be an object");
      for (auto it = s.begin(); it != s.end(); ++it)
        if (it.key() != "kind" && it.key() != "tau") throw ConfigError("unknown strategy key '" + it.key() + "'");
      std::string kind = s.at("kind").get<std::string>();
      if (kind == "canonical_bfs") {
        if (s.contains("tau")) throw ConfigError("canonical_bfs takes no tau");
        return CanonicalBFS{};
      }
      if (kind == "word_enum") return WordEnum{s.value("tau", 1e-9)};
      throw ConfigError("unknown strategy '" + kind + "'");
    });
  }
  if (j.contains("k_range")) {
    field("k_range", [&] {
      auto r = j["k_range"].get<std::vector<int>>();
      if (r.size() != 2 || r[0] < 0 || r[1] < r[0]) throw ConfigError("k_range must be [from, to] with 0 <= from <= to");
      c.k_from = r[0];
      c.k_to = r[1];
      return 0;
    });
  }
  if (j.contains("epsilons")) {
    c.epsilons = field("epsilons", [&] {
      auto e = j["epsilons"].get<std::vector<double>>();
      if (e.empty()) throw ConfigError("epsilons must be nonempty");
      for (double x : e)
        if (!(x > 0.0)) throw ConfigError("epsilons must be positive");
      return e;
    });
  }
  if (j.contains("probes")) c.probes = field("probes", [&] { return probe_spec_from_json(j["probes"]); });
  if (j.contains("metric")) c.metric = field("metric", [&] { return metric_from_name(j["metric"].get<std::string>()); });
  if (j.contains("words")) c.words = field("words", [&] { return word_set_from_name(j["words"].get<std::string>()); });
  if (j.contains("seed")) c.seed = field("seed", [&] { return j["seed"].get<std::uint64_t>(); });
  if (j.contains("cap")) {
    c.cap = field("cap", [&] {
      auto v = j["cap"].get<std::size_t>();
      if (v == 0) throw ConfigError("cap must be positive");
      return v;
    });
  }
  if (j.contains("threads")) {
    c.threads = field("threads", [&] {
      int t = j["threads"].get<int>();
      if (t < 1) throw ConfigError("threads must be >= 1");
      return t;
    });
  }
  if (j.contains("output")) c.output = field("output", [&] { return j["output"].get<std::string>(); });
}

bool randomized(const ExperimentConfig& c) {
  if (c.probes.kind == "random") return true;
  return c.probes.kind == "default" && std::holds_alternative<EuclideanBounded>(c.family.space);
}

ExperimentConfig build(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("preset")) {
    std::string name = field("preset", [&] { return j["preset"].get<std::string>(); });
    if (!presets().count(name)) throw KeyError("preset", "unknown preset '" + name + "'");
    apply_keys(c, preset_json(name));
    c.preset = name;
  }
  apply_keys(c, j);
  if (c.family.generators.empty()) throw KeyError("family", "config needs a family or a preset");
  if (c.epsilons.empty()) throw KeyError("epsilons", "config needs epsilons");
  if (randomized(c) && !c.seed) throw KeyError("seed", "randomized probes need an explicit seed");
  if (c.seed && c.probes.seed == 0) c.probes.seed = *c.seed;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

nlohmann::json preset_json(const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("unknown preset '" + name + "'");
  return nlohmann::json::parse(it->second);
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    return build(j);
  } catch (const KeyError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig config_from_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos ? pos - 1 : 0), '\n'));
    throw ConfigError("line " + std::to_string(line) + ": JSON parse error: " + e.what());
  }
  try {
    return build(j);
  } catch (const KeyError& e) {
    int line = line_of_key(text, e.key);
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_text(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig preset_config(const std::string& name) { return config_from_json(nlohmann::json{{"preset", name}}); }

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json strategy{{"kind", strategy_name(c.strategy)}};
  if (const auto* w = std::get_if<WordEnum>(&c.strategy)) strategy["tau"] = w->tau;
  nlohmann::json j{{"family", family_to_json(c.family)},
                   {"strategy", strategy},
                   {"k_range", {c.k_from, c.k_to}},
                   {"epsilons", c.epsilons},
                   {"probes", probe_spec_to_json(c.probes)},
                   {"metric", metric_name(c.metric)},
                   {"words", word_set_name(c.words)},
                   {"cap", c.cap},
                   {"threads", c.threads}};
  if (c.seed) j["seed"] = *c.seed;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  nlohmann::json j = config_to_json(c);
  j.erase("threads");
  j.erase("output");
  const std::string s = j.dump();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GrowthRequest to_request(const ExperimentConfig& c) {
  GrowthRequest r;
  r.family = c.family;
  for (int k = c.k_from; k <= c.k_to; ++k) r.ks.push_back(k);
  r.epsilons = c.epsilons;
  r.probes = c.probes;
  r.strategy = c.strategy;
  r.metric = c.metric;
  r.words = c.words;
  r.cap = c.cap;
  r.threads = c.threads;
  return r;
}

GrowthRun run_growth(const ExperimentConfig& c) {
  GrowthRun run;
  run.profile = growth_profile(to_request(c));
  run.csv = profile_csv(run.profile, config_hash(c));
  return run;
}

E3Result run_e3(const Family& f, int k, double eps, const ProbeSet& probes, MetricTag tag) {
  if (k < 0) throw PreconditionError("k must be nonnegative");
  int reset = -1, expand = -1;
  std::vector<std::uint16_t> writers;
  double lambda = 0.0;
  for (std::size_t i = 0; i < f.generators.size(); ++i) {
    const auto& g = f.generators[i];
    if (std::holds_alternative<Reset>(g) && reset < 0) reset = static_cast<int>(i);
    if (const auto* e = std::get_if<Expand>(&g); e && expand < 0) {
      expand = static_cast<int>(i);
      lambda = e->lambda;
    }
    if (std::holds_alternative<Writer>(g)) writers.push_back(static_cast<std::uint16_t>(i));
  }
  if (reset < 0 || expand < 0 || writers.empty())
    throw PreconditionError("family needs a reset, an expand map and at least one writer");

  E3Result r;
  r.k = k;
  r.epsilon = eps;
  EvalMatrix wm(f.space, probes.points.size());
  for (auto w : writers) {
    std::vector<Point> row;
    for (const auto& p : probes.points) row.push_back(apply(f.space, f.generators[w], p));
    wm.append_points(row);
  }
  r.bound = e3_multiplicative_bound(wm, tag, lambda, k, eps);

  EvalMatrix m(f.space, probes.points.size());
  std::vector<std::size_t> digits(static_cast<std::size_t>(k), 0);
  for (;;) {
    // digits[j] picks g_{j+1}; the word reads A g_k ... A g_1 r from the left.
    Word w;
    for (int j = k - 1; j >= 0; --j) {
      w.push_back(static_cast<std::uint16_t>(expand));
      w.push_back(writers[digits[static_cast<std::size_t>(j)]]);
    }
    w.push_back(static_cast<std::uint16_t>(reset));
    std::vector<Point> row;
    for (const auto& p : probes.points) row.push_back(apply_word(f, w, p));
    m.append_points(row);
    std::size_t j = 0;
    while (j < digits.size() && ++digits[j] == writers.size()) digits[j++] = 0;
    if (j == digits.size()) break;
  }
  r.words = m.rows();
  r.direct = greedy_packing(m, tag, eps).size();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << data;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace depthlab
