#include "depthlab/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
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

const std::vector<double>& as_vec(const Space& s, const Point& p) {
  if (!std::holds_alternative<std::vector<double>>(p))
    throw SpaceMismatch("expected a coordinate vector for " + space_kind(s));
  return std::get<std::vector<double>>(p);
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in space descriptor");
}

}  // namespace

std::string space_kind(const Space& s) {
  return std::visit(overloaded{[](const Interval&) { return std::string("interval"); },
                               [](const Torus&) { return std::string("torus"); },
                               [](const EuclideanBounded&) { return std::string("euclidean_bounded"); },
                               [](const Circle&) { return std::string("circle"); },
                               [](const Subshift&) { return std::string("subshift"); },
                               [](const FreeGroup&) { return std::string("free_group"); }},
                    s);
}

void validate_space(const Space& s) {
  std::visit(overloaded{[](const Interval& v) {
                          if (!(v.lo < v.hi)) throw PreconditionError("interval requires lo < hi");
                        },
                        [](const Torus& v) {
                          if (v.dim < 1) throw PreconditionError("torus requires dim >= 1");
                        },
                        [](const EuclideanBounded& v) {
                          if (v.dim < 1) throw PreconditionError("euclidean_bounded requires dim >= 1");
                        },
                        [](const Circle&) {},
                        [](const Subshift& v) {
                          if (v.alphabet < 1 || v.alphabet > 254)
                            throw PreconditionError("subshift alphabet must be in [1, 254]");
                          if (!(v.theta > 0.0 && v.theta < 1.0))
                            throw PreconditionError("subshift theta must lie in (0,1)");
                        },
                        [](const FreeGroup& v) {
                          if (v.rank < 2 || v.rank > 127) throw PreconditionError("free group rank must be in [2, 127]");
                          if (v.max_word_len < 1) throw PreconditionError("free group max_word_len must be positive");
                        }},
             s);
}

int space_dim(const Space& s) {
  return std::visit(overloaded{[](const Interval&) { return 1; }, [](const Torus& v) { return v.dim; },
                               [](const EuclideanBounded& v) { return v.dim; }, [](const Circle&) { return 1; },
                               [](const Subshift&) { return 0; }, [](const FreeGroup&) { return 0; }},
                    s);
}

bool is_real_space(const Space& s) { return space_dim(s) > 0; }

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double circular_delta(double a, double b) {
  double d = std::fabs(a - b);
  d = d - std::floor(d);
  return std::min(d, 1.0 - d);
}

bool is_valid_point(const Space& s, const Point& p) {
  return std::visit(
      overloaded{[&](const Interval& v) {
                   if (!std::holds_alternative<double>(p)) return false;
                   double x = std::get<double>(p);
                   return std::isfinite(x) && x >= v.lo && x <= v.hi;
                 },
                 [&](const Torus& v) {
                   if (!std::holds_alternative<std::vector<double>>(p)) return false;
                   const auto& x = std::get<std::vector<double>>(p);
                   if (static_cast<int>(x.size()) != v.dim) return false;
                   return std::all_of(x.begin(), x.end(), [](double c) { return c >= 0.0 && c < 1.0; });
                 },
                 [&](const Circle&) {
                   if (!std::holds_alternative<std::vector<double>>(p)) return false;
                   const auto& x = std::get<std::vector<double>>(p);
                   return x.size() == 1 && x[0] >= 0.0 && x[0] < 1.0;
                 },
                 [&](const EuclideanBounded& v) {
                   if (!std::holds_alternative<std::vector<double>>(p)) return false;
                   const auto& x = std::get<std::vector<double>>(p);
                   if (static_cast<int>(x.size()) != v.dim) return false;
                   return std::all_of(x.begin(), x.end(), [](double c) { return std::isfinite(c); });
                 },
                 [&](const Subshift& v) {
                   if (!std::holds_alternative<SubshiftPoint>(p)) return false;
                   const auto& x = std::get<SubshiftPoint>(p);
                   auto ok = [&](std::uint8_t c) { return c <= v.alphabet; };
                   if (!ok(x.tail) || !std::all_of(x.prefix.begin(), x.prefix.end(), ok)) return false;
                   return x.prefix.empty() || x.prefix.back() != x.tail;
                 },
                 [&](const FreeGroup& v) {
                   if (!std::holds_alternative<FreeWord>(p)) return false;
                   const auto& w = std::get<FreeWord>(p).letters;
                   if (static_cast<int>(w.size()) > v.max_word_len) return false;
                   for (std::size_t i = 0; i < w.size(); ++i) {
                     if (w[i] == 0 || std::abs(w[i]) > v.rank) return false;
                     if (i > 0 && w[i] == -w[i - 1]) return false;
                   }
                   return true;
                 }},
      s);
}

void check_point(const Space& s, const Point& p) {
  if (!is_valid_point(s, p)) throw SpaceMismatch("point " + point_to_string(p) + " is not valid for " + space_kind(s));
}

std::uint8_t subshift_symbol(const SubshiftPoint& p, std::size_t i) {
  return i < p.prefix.size() ? p.prefix[i] : p.tail;
}

SubshiftPoint normalize(SubshiftPoint p) {
  while (!p.prefix.empty() && p.prefix.back() == p.tail) p.prefix.pop_back();
  return p;
}

SubshiftPoint make_subshift_point(std::vector<std::uint8_t> prefix, std::uint8_t tail) {
  return normalize(SubshiftPoint{std::move(prefix), tail});
}

double distance(const Space& s, const Point& p, const Point& q) {
  return std::visit(
      overloaded{[&](const Interval&) {
                   if (!std::holds_alternative<double>(p) || !std::holds_alternative<double>(q))
                     throw SpaceMismatch("interval distance needs scalar points");
                   return std::fabs(std::get<double>(p) - std::get<double>(q));
                 },
                 [&](const EuclideanBounded& v) {
                   const auto& a = as_vec(s, p);
                   const auto& b = as_vec(s, q);
                   if (static_cast<int>(a.size()) != v.dim || static_cast<int>(b.size()) != v.dim)
                     throw SpaceMismatch("dimension mismatch");
                   double acc = 0.0;
                   for (int c = 0; c < v.dim; ++c) acc += (a[c] - b[c]) * (a[c] - b[c]);
                   return std::min(1.0, std::sqrt(acc));
                 },
                 [&](const Subshift& v) {
                   if (!std::holds_alternative<SubshiftPoint>(p) || !std::holds_alternative<SubshiftPoint>(q))
                     throw SpaceMismatch("subshift distance needs subshift points");
                   const auto& a = std::get<SubshiftPoint>(p);
                   const auto& b = std::get<SubshiftPoint>(q);
                   std::size_t span = std::max(a.prefix.size(), b.prefix.size()) + 1;
                   for (std::size_t i = 0; i < span; ++i)
                     if (subshift_symbol(a, i) != subshift_symbol(b, i)) return std::pow(v.theta, static_cast<double>(i));
                   return 0.0;
                 },
                 [&](const FreeGroup&) {
                   if (!std::holds_alternative<FreeWord>(p) || !std::holds_alternative<FreeWord>(q))
                     throw SpaceMismatch("free group distance needs words");
                   const auto& a = std::get<FreeWord>(p).letters;
                   const auto& b = std::get<FreeWord>(q).letters;
                   std::size_t l = 0;
                   while (l < a.size() && l < b.size() && a[l] == b[l]) ++l;
                   return static_cast<double>(a.size() + b.size() - 2 * l);
                 },
                 [&](const auto&) {
                   // Torus and circle.
                   const auto& a = as_vec(s, p);
                   const auto& b = as_vec(s, q);
                   int dim = space_dim(s);
                   if (static_cast<int>(a.size()) != dim || static_cast<int>(b.size()) != dim)
                     throw SpaceMismatch("dimension mismatch");
                   double acc = 0.0;
                   for (int c = 0; c < dim; ++c) {
                     double d = circular_delta(a[c], b[c]);
                     acc += d * d;
                   }
                   return std::sqrt(acc);
                 }},
      s);
}

bool approx_equal(const Space& s, const Point& p, const Point& q, double tol) { return distance(s, p, q) <= tol; }

FreeWord free_reduce(const std::vector<std::int16_t>& letters) {
  FreeWord out;
  for (auto c : letters) {
    if (!out.letters.empty() && out.letters.back() == -c)
      out.letters.pop_back();
    else
      out.letters.push_back(c);
  }
  return out;
}

FreeWord free_multiply(const FreeWord& a, const FreeWord& b, int max_len) {
  std::size_t cancel = 0;
  while (cancel < a.letters.size() && cancel < b.letters.size() &&
         a.letters[a.letters.size() - 1 - cancel] == -b.letters[cancel])
    ++cancel;
  std::size_t len = a.letters.size() + b.letters.size() - 2 * cancel;
  if (static_cast<int>(len) > max_len)
    throw WordOverflow("free group word length " + std::to_string(len) + " exceeds cap " + std::to_string(max_len));
  FreeWord out;
  out.letters.reserve(len);
  out.letters.insert(out.letters.end(), a.letters.begin(), a.letters.end() - static_cast<std::ptrdiff_t>(cancel));
  out.letters.insert(out.letters.end(), b.letters.begin() + static_cast<std::ptrdiff_t>(cancel), b.letters.end());
  return out;
}

FreeWord free_inverse(const FreeWord& a) {
  FreeWord out;
  out.letters.assign(a.letters.rbegin(), a.letters.rend());
  for (auto& c : out.letters) c = static_cast<std::int16_t>(-c);
  return out;
}

std::string point_to_string(const Point& p) {
  char buf[64];
  return std::visit(overloaded{[&](double x) {
                                 std::snprintf(buf, sizeof buf, "%.17g", x);
                                 return std::string(buf);
                               },
                               [&](const std::vector<double>& v) {
                                 std::string out = "(";
                                 for (std::size_t i = 0; i < v.size(); ++i) {
                                   std::snprintf(buf, sizeof buf, "%.17g", v[i]);
                                   if (i) out += ';';
                                   out += buf;
                                 }
                                 return out + ")";
                               },
                               [&](const SubshiftPoint& s) {
                                 std::string out;
                                 for (auto c : s.prefix) out += std::to_string(c) + ".";
                                 return out + "(" + std::to_string(s.tail) + ")";
                               },
                               [&](const FreeWord& w) {
                                 if (w.letters.empty()) return std::string("e");
                                 std::string out;
                                 for (std::size_t i = 0; i < w.letters.size(); ++i) {
                                   if (i) out += ' ';
                                   out += "a" + std::to_string(std::abs(w.letters[i]));
                                   if (w.letters[i] < 0) out += "^-1";
                                 }
                                 return out;
                               }},
                    p);
}

nlohmann::json space_to_json(const Space& s) {
  using nlohmann::json;
  return std::visit(overloaded{[](const Interval& v) { return json{{"kind", "interval"}, {"lo", v.lo}, {"hi", v.hi}}; },
                               [](const Torus& v) { return json{{"kind", "torus"}, {"dim", v.dim}}; },
                               [](const EuclideanBounded& v) { return json{{"kind", "euclidean_bounded"}, {"dim", v.dim}}; },
                               [](const Circle&) { return json{{"kind", "circle"}}; },
                               [](const Subshift& v) {
                                 return json{{"kind", "subshift"}, {"alphabet", v.alphabet}, {"theta", v.theta}};
                               },
                               [](const FreeGroup& v) {
                                 return json{{"kind", "free_group"}, {"rank", v.rank}, {"max_word_len", v.max_word_len}};
                               }},
                    s);
}

Space space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("space descriptor must be an object with a string 'kind'");
  const std::string kind = j["kind"];
  Space s;
  try {
    if (kind == "interval") {
      require_keys(j, {"kind", "lo", "hi"});
      s = Interval{j.value("lo", 0.0), j.value("hi", 1.0)};
    } else if (kind == "torus") {
      require_keys(j, {"kind", "dim"});
      s = Torus{j.at("dim").get<int>()};
    } else if (kind == "euclidean_bounded") {
      require_keys(j, {"kind", "dim"});
      s = EuclideanBounded{j.at("dim").get<int>()};
    } else if (kind == "circle") {
      require_keys(j, {"kind"});
      s = Circle{};
    } else if (kind == "subshift") {
      require_keys(j, {"kind", "alphabet", "theta"});
      s = Subshift{j.at("alphabet").get<int>(), j.value("theta", 0.5)};
    } else if (kind == "free_group") {
      require_keys(j, {"kind", "rank", "max_word_len"});
      s = FreeGroup{j.at("rank").get<int>(), j.value("max_word_len", 64)};
    } else {
      throw ConfigError("unknown space kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad space descriptor: ") + e.what());
  }
  try {
    validate_space(s);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace depthlab
