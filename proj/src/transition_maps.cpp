#include "depthlab/transition_maps.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "depthlab/errors.hpp"

namespace depthlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void mismatch(const TransitionMap& m, const Space& s) {
  throw SpaceMismatch("map '" + map_kind(m) + "' is not defined on space '" + space_kind(s) + "'");
}

std::vector<double> vec_of(const Space& s, const TransitionMap& m, const Point& p) {
  if (!std::holds_alternative<std::vector<double>>(p)) mismatch(m, s);
  const auto& v = std::get<std::vector<double>>(p);
  if (static_cast<int>(v.size()) != space_dim(s)) throw SpaceMismatch("point has the wrong dimension");
  return v;
}

bool is_torus_like(const Space& s) { return std::holds_alternative<Torus>(s) || std::holds_alternative<Circle>(s); }

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in map descriptor");
}

}  // namespace

std::string map_kind(const TransitionMap& m) {
  return std::visit(overloaded{[](const Identity&) { return "identity"; }, [](const Rotation&) { return "rotation"; },
                               [](const IfsAffine&) { return "ifs_affine"; },
                               [](const Translation&) { return "translation"; }, [](const Shear&) { return "shear"; },
                               [](const HeisenbergGen&) { return "heisenberg"; },
                               [](const PingPongPL&) { return "pingpong_pl"; },
                               [](const SubshiftChamber&) { return "subshift_chamber"; },
                               [](const FreeLeftMul&) { return "free_left_mul"; }, [](const Reset&) { return "reset"; },
                               [](const Expand&) { return "expand"; }, [](const Writer&) { return "writer"; }},
                    m);
}

double pingpong_value(const PingPongPL& m, double x) {
  const double eta = m.eta;
  if (m.index == 0) {
    const double x0 = 1.0 / 3.0 - eta, x1 = 1.0 / 3.0 + eta;
    if (x <= x0) return 3.0 * x;
    if (x >= x1) return 1.0 / 6.0;
    const double y0 = 3.0 * x0, y1 = 1.0 / 6.0;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
  const double x0 = 2.0 / 3.0 - eta, x1 = 2.0 / 3.0 + eta;
  if (x <= x0) return 5.0 / 6.0;
  if (x >= x1) return 3.0 * x - 2.0;
  const double y0 = 5.0 / 6.0, y1 = 3.0 * x1 - 2.0;
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

std::vector<std::pair<double, double>> pingpong_knots(const PingPongPL& m) {
  std::vector<double> xs;
  if (m.index == 0)
    xs = {0.0, 1.0 / 3.0 - m.eta, 1.0 / 3.0 + m.eta, 1.0};
  else
    xs = {0.0, 2.0 / 3.0 - m.eta, 2.0 / 3.0 + m.eta, 1.0};
  std::vector<std::pair<double, double>> out;
  for (double x : xs) out.emplace_back(x, pingpong_value(m, x));
  return out;
}

void validate_map(const Space& s, const TransitionMap& m) {
  const int dim = space_dim(s);
  auto fail = [&](const std::string& why) {
    throw PreconditionError("map '" + map_kind(m) + "' on '" + space_kind(s) + "': " + why);
  };
  std::visit(overloaded{
                 [&](const Identity&) {},
                 [&](const Rotation& r) {
                   if (!(is_torus_like(s) && dim == 1)) fail("needs Circle or Torus(1)");
                   if (!std::isfinite(r.angle)) fail("angle must be finite");
                 },
                 [&](const IfsAffine& a) {
                   if (!std::holds_alternative<Interval>(s)) fail("needs an interval");
                   const auto& iv = std::get<Interval>(s);
                   double y0 = a.slope * iv.lo + a.offset, y1 = a.slope * iv.hi + a.offset;
                   double tol = 1e-12 * std::max(1.0, iv.hi - iv.lo);
                   if (std::min(y0, y1) < iv.lo - tol || std::max(y0, y1) > iv.hi + tol) fail("image leaves the interval");
                 },
                 [&](const Translation& t) {
                   if (!(std::holds_alternative<Torus>(s) || std::holds_alternative<EuclideanBounded>(s)))
                     fail("needs a torus or bounded euclidean space");
                   if (static_cast<int>(t.vector.size()) != dim) fail("vector dimension differs from the space");
                 },
                 [&](const Shear&) {
                   if (!(std::holds_alternative<Torus>(s) && dim == 2)) fail("needs Torus(2)");
                 },
                 [&](const HeisenbergGen& h) {
                   if (!((std::holds_alternative<Torus>(s) || std::holds_alternative<EuclideanBounded>(s)) && dim == 3))
                     fail("needs a 3-dimensional torus or bounded euclidean space");
                   if (h.sign != 1 && h.sign != -1) fail("sign must be +1 or -1");
                   if (!std::isfinite(h.alpha)) fail("alpha must be finite");
                 },
                 [&](const PingPongPL& p) {
                   if (!std::holds_alternative<Interval>(s)) fail("needs an interval");
                   const auto& iv = std::get<Interval>(s);
                   if (iv.lo != 0.0 || iv.hi != 1.0) fail("needs the unit interval");
                   if (p.index != 0 && p.index != 1) fail("index must be 0 or 1");
                   if (!(p.eta > 0.0 && p.eta < 1.0 / 12.0)) fail("eta must lie in (0, 1/12)");
                 },
                 [&](const SubshiftChamber& c) {
                   if (!std::holds_alternative<Subshift>(s)) fail("needs a subshift");
                   if (c.symbol > std::get<Subshift>(s).alphabet) fail("symbol outside the alphabet");
                 },
                 [&](const FreeLeftMul& g) {
                   if (!std::holds_alternative<FreeGroup>(s)) fail("needs a free group");
                   if (g.gen == 0 || std::abs(g.gen) > std::get<FreeGroup>(s).rank) fail("generator index out of range");
                 },
                 [&](const Reset&) {
                   if (!std::holds_alternative<EuclideanBounded>(s)) fail("needs a bounded euclidean space");
                 },
                 [&](const Expand& e) {
                   if (!std::holds_alternative<EuclideanBounded>(s)) fail("needs a bounded euclidean space");
                   if (!(e.lambda > 1.0)) fail("lambda must exceed 1");
                   if (!(e.inner > 0.0 && e.outer > e.inner)) fail("needs 0 < inner < outer");
                 },
                 [&](const Writer& w) {
                   if (!std::holds_alternative<EuclideanBounded>(s)) fail("needs a bounded euclidean space");
                   if (w.knots.empty() || w.knots.size() != w.values.size()) fail("knots and values must match");
                   for (std::size_t i = 1; i < w.knots.size(); ++i)
                     if (!(w.knots[i] > w.knots[i - 1])) fail("knots must increase");
                   for (const auto& v : w.values) {
                     if (static_cast<int>(v.size()) != dim) fail("displacement dimension differs from the space");
                     for (double c : v)
                       if (!(std::fabs(c) <= 1.0)) fail("displacement must satisfy |u|_inf <= 1");
                   }
                 },
             },
             m);
}

void validate_family(const Family& f) {
  validate_space(f.space);
  if (f.generators.empty()) throw PreconditionError("family '" + f.name + "' has no generators");
  if (f.generators.size() > 65535) throw PreconditionError("too many generators");
  for (const auto& g : f.generators) validate_map(f.space, g);
}

void apply_real_inplace(const Space& s, const TransitionMap& m, double* v) {
  const std::size_t dim = static_cast<std::size_t>(space_dim(s));
  std::visit(
      overloaded{
          [&](const Identity&) {},
          [&](const Rotation& r) {
            if (!is_torus_like(s) || dim != 1) mismatch(m, s);
            v[0] = wrap_unit(v[0] + r.angle);
          },
          [&](const IfsAffine& a) {
            if (!std::holds_alternative<Interval>(s)) mismatch(m, s);
            const auto& iv = std::get<Interval>(s);
            v[0] = std::clamp(a.slope * v[0] + a.offset, iv.lo, iv.hi);
          },
          [&](const Translation& t) {
            if (t.vector.size() != dim) throw SpaceMismatch("translation dimension mismatch");
            for (std::size_t c = 0; c < dim; ++c) v[c] += t.vector[c];
            if (std::holds_alternative<Torus>(s))
              for (std::size_t c = 0; c < dim; ++c) v[c] = wrap_unit(v[c]);
            else if (!std::holds_alternative<EuclideanBounded>(s))
              mismatch(m, s);
          },
          [&](const Shear&) {
            if (!std::holds_alternative<Torus>(s) || dim != 2) mismatch(m, s);
            v[1] = wrap_unit(v[0] + v[1]);
          },
          [&](const HeisenbergGen& h) {
            if (dim != 3) mismatch(m, s);
            const double a = h.sign * h.alpha;
            switch (h.which) {
              case HeisenbergAxis::T1: v[0] += a; break;
              case HeisenbergAxis::T2:
                v[1] += a;
                v[2] += h.sign * v[0];
                break;
              case HeisenbergAxis::T3: v[2] += a; break;
            }
            if (std::holds_alternative<Torus>(s))
              for (std::size_t c = 0; c < 3; ++c) v[c] = wrap_unit(v[c]);
            else if (!std::holds_alternative<EuclideanBounded>(s))
              mismatch(m, s);
          },
          [&](const PingPongPL& pp) {
            if (!std::holds_alternative<Interval>(s)) mismatch(m, s);
            v[0] = pingpong_value(pp, v[0]);
          },
          [&](const Reset&) {
            if (!std::holds_alternative<EuclideanBounded>(s)) mismatch(m, s);
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) acc += v[c] * v[c];
            double r = std::sqrt(acc);
            if (r > 1.0)
              for (std::size_t c = 0; c < dim; ++c) v[c] /= r;
          },
          [&](const Expand& e) {
            if (!std::holds_alternative<EuclideanBounded>(s)) mismatch(m, s);
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) acc += v[c] * v[c];
            double r = std::sqrt(acc);
            double scale;
            if (r <= e.inner) {
              scale = e.lambda;
            } else if (r >= e.outer) {
              scale = 1.0;
            } else {
              double r_in = e.lambda * e.inner;
              double target = r_in + (r - e.inner) * (e.outer - r_in) / (e.outer - e.inner);
              scale = target / r;
            }
            for (std::size_t c = 0; c < dim; ++c) v[c] *= scale;
          },
          [&](const Writer& w) {
            if (!std::holds_alternative<EuclideanBounded>(s)) mismatch(m, s);
            const double t = v[0];
            std::size_t hi =
                static_cast<std::size_t>(std::upper_bound(w.knots.begin(), w.knots.end(), t) - w.knots.begin());
            if (hi == 0) {
              for (std::size_t c = 0; c < dim; ++c) v[c] += w.values.front()[c];
            } else if (hi == w.knots.size()) {
              for (std::size_t c = 0; c < dim; ++c) v[c] += w.values.back()[c];
            } else {
              double f = (t - w.knots[hi - 1]) / (w.knots[hi] - w.knots[hi - 1]);
              for (std::size_t c = 0; c < dim; ++c)
                v[c] += w.values[hi - 1][c] + f * (w.values[hi][c] - w.values[hi - 1][c]);
            }
          },
          [&](const auto&) { mismatch(m, s); },
      },
      m);
}

Point apply(const Space& s, const TransitionMap& m, const Point& p) {
  if (is_real_space(s)) {
    if (std::holds_alternative<Interval>(s)) {
      if (!std::holds_alternative<double>(p)) mismatch(m, s);
      double x = std::get<double>(p);
      apply_real_inplace(s, m, &x);
      return x;
    }
    auto v = vec_of(s, m, p);
    apply_real_inplace(s, m, v.data());
    return v;
  }
  return std::visit(
      overloaded{
          [&](const Identity&) -> Point { return p; },
          [&](const SubshiftChamber& c) -> Point {
            if (!std::holds_alternative<Subshift>(s) || !std::holds_alternative<SubshiftPoint>(p)) mismatch(m, s);
            const auto& x = std::get<SubshiftPoint>(p);
            if (subshift_symbol(x, 0) != c.symbol) return SubshiftPoint{{}, c.symbol};
            if (x.prefix.empty()) return x;
            return SubshiftPoint{std::vector<std::uint8_t>(x.prefix.begin() + 1, x.prefix.end()), x.tail};
          },
          [&](const FreeLeftMul& g) -> Point {
            if (!std::holds_alternative<FreeGroup>(s) || !std::holds_alternative<FreeWord>(p)) mismatch(m, s);
            FreeWord letter{{static_cast<std::int16_t>(g.gen)}};
            return free_multiply(letter, std::get<FreeWord>(p), std::get<FreeGroup>(s).max_word_len);
          },
          [&](const auto&) -> Point { mismatch(m, s); },
      },
      m);
}

Point apply_word(const Family& f, const Word& w, const Point& p) {
  Point x = p;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (*it >= f.generators.size()) throw PreconditionError("word letter out of range");
    x = apply(f.space, f.generators[*it], x);
  }
  return x;
}

double empirical_lipschitz(const Space& s, const TransitionMap& m, const std::vector<std::pair<Point, Point>>& pairs) {
  if (pairs.empty()) throw PreconditionError("empirical_lipschitz needs at least one pair");
  double best = 0.0;
  for (const auto& [x, y] : pairs) {
    double dxy = distance(s, x, y);
    if (!(dxy > 0.0)) throw PreconditionError("empirical_lipschitz pairs must be distinct");
    best = std::max(best, distance(s, apply(s, m, x), apply(s, m, y)) / dxy);
  }
  return best;
}

nlohmann::json map_to_json(const TransitionMap& m) {
  using nlohmann::json;
  json j{{"map", map_kind(m)}};
  std::visit(overloaded{[&](const Identity&) {}, [&](const Rotation& r) { j["angle"] = r.angle; },
                        [&](const IfsAffine& a) {
                          j["slope"] = a.slope;
                          j["offset"] = a.offset;
                        },
                        [&](const Translation& t) { j["vector"] = t.vector; }, [&](const Shear&) {},
                        [&](const HeisenbergGen& h) {
                          j["which"] = h.which == HeisenbergAxis::T1 ? "T1" : h.which == HeisenbergAxis::T2 ? "T2" : "T3";
                          j["alpha"] = h.alpha;
                          j["sign"] = h.sign;
                        },
                        [&](const PingPongPL& p) {
                          j["index"] = p.index;
                          j["eta"] = p.eta;
                        },
                        [&](const SubshiftChamber& c) { j["symbol"] = c.symbol; },
                        [&](const FreeLeftMul& g) { j["gen"] = g.gen; }, [&](const Reset&) {},
                        [&](const Expand& e) {
                          j["lambda"] = e.lambda;
                          j["inner"] = e.inner;
                          j["outer"] = e.outer;
                        },
                        [&](const Writer& w) {
                          j["id"] = w.id;
                          j["knots"] = w.knots;
                          j["values"] = w.values;
                        }},
             m);
  return j;
}

TransitionMap map_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("map") || !j["map"].is_string())
    throw ConfigError("map descriptor must be an object with a string 'map'");
  const std::string kind = j["map"];
  try {
    if (kind == "identity") {
      require_keys(j, {"map"});
      return Identity{};
    }
    if (kind == "rotation") {
      require_keys(j, {"map", "angle"});
      return Rotation{j.at("angle").get<double>()};
    }
    if (kind == "ifs_affine") {
      require_keys(j, {"map", "slope", "offset"});
      return IfsAffine{j.at("slope").get<double>(), j.at("offset").get<double>()};
    }
    if (kind == "translation") {
      require_keys(j, {"map", "vector"});
      return Translation{j.at("vector").get<std::vector<double>>()};
    }
    if (kind == "shear") {
      require_keys(j, {"map"});
      return Shear{};
    }
    if (kind == "heisenberg") {
      require_keys(j, {"map", "which", "alpha", "sign"});
      std::string w = j.at("which");
      HeisenbergGen h;
      if (w == "T1")
        h.which = HeisenbergAxis::T1;
      else if (w == "T2")
        h.which = HeisenbergAxis::T2;
      else if (w == "T3")
        h.which = HeisenbergAxis::T3;
      else
        throw ConfigError("heisenberg 'which' must be T1, T2 or T3");
      h.alpha = j.value("alpha", h.alpha);
      h.sign = j.value("sign", 1);
      return h;
    }
    if (kind == "pingpong_pl") {
      require_keys(j, {"map", "index", "eta"});
      return PingPongPL{j.at("index").get<int>(), j.value("eta", 0.05)};
    }
    if (kind == "subshift_chamber") {
      require_keys(j, {"map", "symbol"});
      int sym = j.at("symbol").get<int>();
      if (sym < 0 || sym > 255) throw ConfigError("subshift symbol out of range");
      return SubshiftChamber{static_cast<std::uint8_t>(sym)};
    }
    if (kind == "free_left_mul") {
      require_keys(j, {"map", "gen"});
      return FreeLeftMul{j.at("gen").get<int>()};
    }
    if (kind == "reset") {
      require_keys(j, {"map"});
      return Reset{};
    }
    if (kind == "expand") {
      require_keys(j, {"map", "lambda", "inner", "outer"});
      Expand e;
      e.lambda = j.at("lambda").get<double>();
      e.inner = j.value("inner", e.inner);
      e.outer = j.value("outer", e.outer);
      return e;
    }
    if (kind == "writer") {
      require_keys(j, {"map", "id", "knots", "values"});
      return Writer{j.value("id", std::string()), j.at("knots").get<std::vector<double>>(),
                    j.at("values").get<std::vector<std::vector<double>>>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad '" + kind + "' map descriptor: " + e.what());
  }
  throw ConfigError("unknown map kind '" + kind + "'");
}

nlohmann::json family_to_json(const Family& f) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : f.generators) gens.push_back(map_to_json(g));
  return {{"name", f.name}, {"space", space_to_json(f.space)}, {"generators", gens}};
}

Family family_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("family must be an object");
  require_keys(j, {"name", "space", "generators"});
  if (!j.contains("space") || !j.contains("generators") || !j["generators"].is_array())
    throw ConfigError("family needs 'space' and a 'generators' array");
  Family f;
  f.name = j.value("name", std::string("custom"));
  f.space = space_from_json(j["space"]);
  for (const auto& g : j["generators"]) f.generators.push_back(map_from_json(g));
  try {
    validate_family(f);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return f;
}

std::vector<std::string> family_preset_names() {
  return {"cantor", "shear", "heisenberg", "pingpong-pl", "subshift", "free2", "e3"};
}

Family family_preset(const std::string& name) {
  Family f;
  f.name = name;
  if (name == "cantor") {
    f.space = Interval{0.0, 1.0};
    f.generators = {IfsAffine{1.0 / 3.0, 0.0}, IfsAffine{1.0 / 3.0, 2.0 / 3.0}};
  } else if (name == "shear") {
    f.space = Torus{2};
    f.generators = {Shear{}};
  } else if (name == "heisenberg") {
    const double a = std::sqrt(2.0) - 1.0;
    f.space = EuclideanBounded{3};
    f.generators = {HeisenbergGen{HeisenbergAxis::T1, a, 1}, HeisenbergGen{HeisenbergAxis::T1, a, -1},
                    HeisenbergGen{HeisenbergAxis::T2, a, 1}, HeisenbergGen{HeisenbergAxis::T2, a, -1},
                    HeisenbergGen{HeisenbergAxis::T3, a, 1}, HeisenbergGen{HeisenbergAxis::T3, a, -1}};
  } else if (name == "pingpong-pl") {
    f.space = Interval{0.0, 1.0};
    f.generators = {PingPongPL{0, 0.05}, PingPongPL{1, 0.05}};
  } else if (name == "subshift") {
    f.space = Subshift{2, 0.5};
    f.generators = {SubshiftChamber{1}, SubshiftChamber{2}};
  } else if (name == "free2") {
    f.space = FreeGroup{2, 64};
    f.generators = {FreeLeftMul{1}, FreeLeftMul{2}};
  } else if (name == "e3") {
    f.space = EuclideanBounded{2};
    const double h = std::sqrt(3.0) / 4.0;
    f.generators = {Reset{},
                    Expand{2.0, 64.0, 128.0},
                    Writer{"w0", {0.0}, {{0.0, 0.0}}},
                    Writer{"w1", {0.0}, {{0.5, 0.0}}},
                    Writer{"w2", {0.0}, {{0.25, h}}}};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  validate_family(f);
  return f;
}

}  // namespace depthlab
