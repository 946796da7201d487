#include "depthlab/word_ball.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "depthlab/errors.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/piecewise_linear.hpp"

namespace depthlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double u01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct ElementHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    for (auto x : v) h = splitmix64(h ^ static_cast<std::uint64_t>(x));
    return static_cast<std::size_t>(h);
  }
};

// ---------------------------------------------------------------- canonical forms

enum class AbelianKind { Trivial, Translation, Rotation, Shear };

struct CanonicalModel {
  CanonicalKind kind = CanonicalKind::None;
  AbelianKind abelian = AbelianKind::Trivial;
  std::vector<std::vector<std::int64_t>> gen;  // element of each generator
  std::vector<std::vector<double>> class_vec;  // translation direction or rotation angle per class
  double alpha = 0.0;
  int max_len = 0;

  std::vector<std::int64_t> identity() const {
    if (kind == CanonicalKind::Abelian) return std::vector<std::int64_t>(class_vec.size() + (abelian == AbelianKind::Shear), 0);
    if (kind == CanonicalKind::Heisenberg) return {0, 0, 0};
    return {};
  }

  // g after e.
  std::vector<std::int64_t> compose(const std::vector<std::int64_t>& g, const std::vector<std::int64_t>& e) const {
    if (kind == CanonicalKind::Abelian) {
      std::vector<std::int64_t> out(e);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += g[c];
      return out;
    }
    if (kind == CanonicalKind::Heisenberg) return {g[0] + e[0], g[1] + e[1], g[2] + e[2] + g[1] * e[0]};
    FreeWord a, b;
    a.letters.assign(g.begin(), g.end());
    b.letters.assign(e.begin(), e.end());
    FreeWord r = free_multiply(a, b, max_len);
    return std::vector<std::int64_t>(r.letters.begin(), r.letters.end());
  }
};

CanonicalModel build_model(const Family& f) {
  CanonicalModel m;
  bool any_shear = false, any_trans = false, any_rot = false, any_heis = false, any_free = false, other = false;
  for (const auto& g : f.generators) {
    if (std::holds_alternative<Identity>(g)) continue;
    any_shear |= std::holds_alternative<Shear>(g);
    any_trans |= std::holds_alternative<Translation>(g);
    any_rot |= std::holds_alternative<Rotation>(g);
    any_heis |= std::holds_alternative<HeisenbergGen>(g);
    any_free |= std::holds_alternative<FreeLeftMul>(g);
    other |= !(std::holds_alternative<Shear>(g) || std::holds_alternative<Translation>(g) ||
               std::holds_alternative<Rotation>(g) || std::holds_alternative<HeisenbergGen>(g) ||
               std::holds_alternative<FreeLeftMul>(g));
  }
  int kinds = any_shear + any_trans + any_rot + any_heis + any_free;
  if (other || kinds > 1) return m;

  if (any_heis) {
    m.kind = CanonicalKind::Heisenberg;
    bool first = true;
    for (const auto& g : f.generators) {
      if (std::holds_alternative<Identity>(g)) {
        m.gen.push_back({0, 0, 0});
        continue;
      }
      const auto& h = std::get<HeisenbergGen>(g);
      if (first) m.alpha = h.alpha;
      first = false;
      if (h.alpha != m.alpha) return CanonicalModel{};
      std::vector<std::int64_t> e{0, 0, 0};
      e[static_cast<int>(h.which)] = h.sign;
      m.gen.push_back(e);
    }
    return m;
  }
  if (any_free) {
    m.kind = CanonicalKind::Free;
    m.max_len = std::get<FreeGroup>(f.space).max_word_len;
    for (const auto& g : f.generators) {
      if (std::holds_alternative<Identity>(g))
        m.gen.push_back({});
      else
        m.gen.push_back({std::get<FreeLeftMul>(g).gen});
    }
    return m;
  }

  // Abelian families.  Generators equal up to sign share a class; distinct
  // classes are assumed to be rationally independent.
  m.kind = CanonicalKind::Abelian;
  m.abelian = any_shear ? AbelianKind::Shear : any_trans ? AbelianKind::Translation
              : any_rot ? AbelianKind::Rotation : AbelianKind::Trivial;
  std::vector<std::pair<std::size_t, int>> assign;
  for (const auto& g : f.generators) {
    std::vector<double> v;
    if (const auto* t = std::get_if<Translation>(&g)) v = t->vector;
    else if (const auto* r = std::get_if<Rotation>(&g)) v = {r->angle};
    else if (std::holds_alternative<Shear>(g)) v = {1.0};
    else {
      assign.emplace_back(0, 0);
      continue;
    }
    std::vector<double> neg(v);
    for (double& c : neg) c = -c;
    std::size_t c = 0;
    int sign = 0;
    for (; c < m.class_vec.size(); ++c) {
      if (m.class_vec[c] == v) { sign = 1; break; }
      if (m.class_vec[c] == neg) { sign = -1; break; }
    }
    if (sign == 0) {
      m.class_vec.push_back(v);
      sign = 1;
    }
    assign.emplace_back(c, sign);
  }
  if (m.abelian == AbelianKind::Shear) m.class_vec.assign(1, {1.0});
  for (auto [c, sign] : assign) {
    std::vector<std::int64_t> e(m.class_vec.size(), 0);
    if (sign != 0) e[c] = sign;
    m.gen.push_back(e);
  }
  return m;
}

Point apply_model(const Family& f, const CanonicalModel& m, const std::vector<std::int64_t>& e, const Point& p) {
  const bool torus = std::holds_alternative<Torus>(f.space) || std::holds_alternative<Circle>(f.space);
  auto wrap = [&](std::vector<double>& v) {
    if (torus)
      for (double& c : v) c = wrap_unit(c);
  };
  switch (m.kind) {
    case CanonicalKind::Heisenberg: {
      std::vector<double> v = std::get<std::vector<double>>(p);
      const double x = v[0];
      v[0] = x + static_cast<double>(e[0]) * m.alpha;
      v[1] = v[1] + static_cast<double>(e[1]) * m.alpha;
      v[2] = v[2] + static_cast<double>(e[1]) * x + static_cast<double>(e[2]) * m.alpha;
      wrap(v);
      return v;
    }
    case CanonicalKind::Free: {
      FreeWord w;
      w.letters.assign(e.begin(), e.end());
      return free_multiply(w, std::get<FreeWord>(p), m.max_len);
    }
    case CanonicalKind::Abelian: {
      if (m.abelian == AbelianKind::Trivial) return p;
      std::vector<double> v = std::get<std::vector<double>>(p);
      if (m.abelian == AbelianKind::Shear) {
        v[1] = v[1] + static_cast<double>(e[0]) * v[0];
      } else {
        std::vector<double> offset(v.size(), 0.0);
        for (std::size_t c = 0; c < m.class_vec.size(); ++c)
          for (std::size_t d = 0; d < v.size(); ++d) offset[d] += static_cast<double>(e[c]) * m.class_vec[c][d];
        for (std::size_t d = 0; d < v.size(); ++d) v[d] += offset[d];
      }
      wrap(v);
      return v;
    }
    case CanonicalKind::None: break;
  }
  throw PreconditionError("family '" + f.name + "' has no canonical form");
}

// ---------------------------------------------------------------- packed rows

std::size_t symbol_width_for(const Space& s, const ProbeSet& probes, int depth) {
  std::size_t width = 1;
  if (std::holds_alternative<Subshift>(s)) {
    for (const auto& p : probes.points) width = std::max(width, std::get<SubshiftPoint>(p).prefix.size());
  } else if (const auto* fg = std::get_if<FreeGroup>(&s)) {
    std::size_t longest = 0;
    for (const auto& p : probes.points) longest = std::max(longest, std::get<FreeWord>(p).letters.size());
    width = std::min<std::size_t>(static_cast<std::size_t>(fg->max_word_len),
                                  longest + static_cast<std::size_t>(std::max(depth, 0)));
    width = std::max<std::size_t>(width, 1);
  }
  return width;
}

EvalMatrix matrix_for(const Space& s, const ProbeSet& probes, int depth) {
  if (probes.points.empty()) throw PreconditionError("probe set is empty");
  return EvalMatrix(s, probes.points.size(), symbol_width_for(s, probes, depth));
}

void apply_generator_real(const Space& s, const TransitionMap& g, const EvalMatrix& m, const double* in, double* out) {
  const std::size_t n = m.probes(), dim = m.dim();
  if (std::holds_alternative<Identity>(g)) {
    std::memcpy(out, in, sizeof(double) * n * dim);
    return;
  }
  if (dim == 1) {
    if (const auto* pp = std::get_if<PingPongPL>(&g)) {
      for (std::size_t i = 0; i < n; ++i) out[i] = pingpong_value(*pp, in[i]);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = in[i];
      apply_real_inplace(s, g, out + i);
    }
    return;
  }
  double v[16];
  std::vector<double> big;
  double* buf = v;
  if (dim > 16) {
    big.resize(dim);
    buf = big.data();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dim; ++c) buf[c] = in[c * n + i];
    apply_real_inplace(s, g, buf);
    for (std::size_t c = 0; c < dim; ++c) out[c * n + i] = buf[c];
  }
}

void apply_generator_symbols(const Space& s, const TransitionMap& g, const EvalMatrix& m, const std::uint8_t* in,
                             std::uint8_t* out) {
  const std::size_t n = m.probes(), cell = m.cell(), width = m.symbol_width();
  std::memcpy(out, in, n * cell);
  if (std::holds_alternative<Identity>(g)) return;
  if (const auto* ch = std::get_if<SubshiftChamber>(&g)) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint8_t* c = out + i * cell;
      if (c[0] == ch->symbol) {
        std::memmove(c, c + 1, width - 1);
        c[width - 1] = c[width];
      } else {
        std::memset(c, ch->symbol, width + 1);
      }
    }
    return;
  }
  if (const auto* lm = std::get_if<FreeLeftMul>(&g)) {
    const int max_len = std::get<FreeGroup>(s).max_word_len;
    const std::uint8_t code = m.encode_letter(static_cast<std::int16_t>(lm->gen));
    const std::uint8_t inv = m.encode_letter(static_cast<std::int16_t>(-lm->gen));
    for (std::size_t i = 0; i < n; ++i) {
      std::uint8_t* c = out + i * cell;
      std::size_t len = c[cell - 1];
      if (len > 0 && c[0] == inv) {
        std::memmove(c, c + 1, len - 1);
        c[len - 1] = 0;
        c[cell - 1] = static_cast<std::uint8_t>(len - 1);
      } else {
        if (static_cast<int>(len) + 1 > max_len)
          throw WordOverflow("free group word length " + std::to_string(len + 1) + " exceeds cap " +
                             std::to_string(max_len));
        if (len + 1 > width) throw PreconditionError("free-group cell too narrow for this depth");
        std::memmove(c + 1, c, len);
        c[0] = code;
        c[cell - 1] = static_cast<std::uint8_t>(len + 1);
      }
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) m.pack_point(apply(s, g, m.unpack_point(nullptr, in, i)), nullptr, out, i);
}

// Finds rows within tau (d_S) of a candidate row.
class DedupIndex {
 public:
  DedupIndex(const EvalMatrix& m, double tau) : m_(m), tau_(tau) {
    const double n = static_cast<double>(m.probes());
    if (!m.is_real()) {
      double min_nonzero = m.is_free_group() ? 1.0 : m.theta_pow(m.symbol_width());
      min_nonzero /= std::sqrt(n);
      mode_ = tau <= min_nonzero ? Mode::Exact : Mode::Scan;
      return;
    }
    window_ = std::sqrt(n) * tau * (1.0 + 1e-9);
    if (m.real_metric() == simd::RealMetric::Circular) {
      mode_ = Mode::KeyedCircular;
    } else if (m.real_metric() == simd::RealMetric::Capped && window_ >= 1.0) {
      mode_ = Mode::Scan;
    } else {
      mode_ = Mode::Keyed;
      const std::size_t len = m.real_stride();
      weights_.resize(len);
      const double scale = 1.0 / std::sqrt(static_cast<double>(len));
      for (std::size_t j = 0; j < len; ++j) weights_[j] = (splitmix64(j) & 1u) ? scale : -scale;
      window_ += 1e-12 * static_cast<double>(len);
    }
  }

  bool near(const double* r, const std::uint8_t* s) const {
    auto close = [&](std::size_t row) {
      const double* rr = m_.is_real() ? m_.real_row(row) : nullptr;
      const std::uint8_t* sr = m_.is_real() ? nullptr : m_.sym_row(row);
      return packed_distance(m_, MetricTag::dS, r, s, rr, sr, tau_) < tau_;
    };
    switch (mode_) {
      case Mode::Exact: {
        auto range = exact_.equal_range(hash_symbols(s));
        for (auto it = range.first; it != range.second; ++it)
          if (std::memcmp(m_.sym_row(it->second), s, m_.sym_stride()) == 0) return true;
        return false;
      }
      case Mode::Scan:
        for (std::size_t row = 0; row < m_.rows(); ++row)
          if (close(row)) return true;
        return false;
      case Mode::Keyed:
      case Mode::KeyedCircular: {
        double key = key_of(r);
        auto scan = [&](double lo, double hi) {
          for (auto it = keyed_.lower_bound(lo); it != keyed_.end() && it->first <= hi; ++it)
            if (close(it->second)) return true;
          return false;
        };
        if (scan(key - window_, key + window_)) return true;
        if (mode_ == Mode::KeyedCircular) {
          if (key - window_ < 0.0 && scan(key - window_ + 1.0, 1.0)) return true;
          if (key + window_ >= 1.0 && scan(0.0, key + window_ - 1.0)) return true;
        }
        return false;
      }
    }
    return false;
  }

  void insert(std::size_t row) {
    switch (mode_) {
      case Mode::Exact: exact_.emplace(hash_symbols(m_.sym_row(row)), row); break;
      case Mode::Scan: break;
      case Mode::Keyed:
      case Mode::KeyedCircular: keyed_.emplace(key_of(m_.real_row(row)), row); break;
    }
  }

 private:
  enum class Mode { Exact, Scan, Keyed, KeyedCircular };

  std::uint64_t hash_symbols(const std::uint8_t* s) const {
    return std::hash<std::string_view>{}(std::string_view(reinterpret_cast<const char*>(s), m_.sym_stride()));
  }
  double key_of(const double* r) const {
    if (mode_ == Mode::KeyedCircular) return r[0];
    double acc = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) acc += weights_[j] * r[j];
    return acc;
  }

  const EvalMatrix& m_;
  double tau_;
  Mode mode_ = Mode::Scan;
  double window_ = 0.0;
  std::vector<double> weights_;
  std::unordered_multimap<std::uint64_t, std::size_t> exact_;
  std::multimap<double, std::size_t> keyed_;
};

struct CapHit {
  std::size_t count;
  int depth;
};

void truncate_below(WordBall& b, int depth) {
  std::size_t keep = b.count_up_to(depth - 1);
  b.words.resize(keep);
  b.parent.resize(keep);
  if (!b.canonical.empty()) b.canonical.resize(keep);
  b.depth = depth - 1;
  b.cap_exceeded_depth = depth;
}

WordBall enumerate_impl(const Family& f, int k, const Strategy& strategy, std::size_t cap, const ProbeSet* dedup,
                        bool throw_on_cap) {
  validate_family(f);
  if (k < 0) throw PreconditionError("depth must be nonnegative");
  if (cap == 0) throw PreconditionError("cap must be positive");
  WordBall b;
  b.depth = k;
  b.family = f.name;
  b.strategy = strategy_name(strategy);
  b.words.push_back({});
  b.parent.push_back(-1);
  const std::size_t G = f.generators.size();

  auto on_cap = [&](int depth) {
    if (throw_on_cap) throw CapExceeded(b.size(), depth);
    truncate_below(b, depth);
  };

  if (std::holds_alternative<CanonicalBFS>(strategy)) {
    CanonicalModel model = build_model(f);
    if (model.kind == CanonicalKind::None)
      throw PreconditionError("family '" + f.name + "' has no canonical form for breadth-first enumeration");
    std::unordered_set<std::vector<std::int64_t>, ElementHash> seen;
    b.canonical.push_back(model.identity());
    seen.insert(b.canonical.back());
    std::vector<std::size_t> frontier{0};
    for (int len = 1; len <= k && !frontier.empty(); ++len) {
      std::vector<std::size_t> next;
      for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t u : frontier) {
          auto e = model.compose(model.gen[g], b.canonical[u]);
          if (seen.count(e)) continue;
          if (b.size() >= cap) {
            on_cap(len);
            return b;
          }
          seen.insert(e);
          Word w;
          w.reserve(b.words[u].size() + 1);
          w.push_back(static_cast<std::uint16_t>(g));
          w.insert(w.end(), b.words[u].begin(), b.words[u].end());
          b.words.push_back(std::move(w));
          b.parent.push_back(static_cast<std::int64_t>(u));
          b.canonical.push_back(std::move(e));
          next.push_back(b.size() - 1);
        }
      }
      frontier = std::move(next);
    }
    return b;
  }

  const double tau = std::get<WordEnum>(strategy).tau;
  b.tau = tau;
  std::vector<std::size_t> frontier{0};
  if (!(tau > 0.0)) {
    for (int len = 1; len <= k; ++len) {
      std::vector<std::size_t> next;
      for (std::size_t g = 0; g < G; ++g)
        for (std::size_t u : frontier) {
          if (b.size() >= cap) {
            on_cap(len);
            return b;
          }
          Word w{static_cast<std::uint16_t>(g)};
          w.insert(w.end(), b.words[u].begin(), b.words[u].end());
          b.words.push_back(std::move(w));
          b.parent.push_back(static_cast<std::int64_t>(u));
          next.push_back(b.size() - 1);
        }
      frontier = std::move(next);
    }
    return b;
  }

  ProbeSet probes = dedup ? *dedup : default_probes(f.space, k, 0);
  EvalMatrix m = matrix_for(f.space, probes, k);
  m.append_points(probes.points);
  m.row_ids.push_back(0);
  DedupIndex index(m, tau);
  index.insert(0);
  std::vector<double> rbuf(m.is_real() ? m.real_stride() : 0);
  std::vector<std::uint8_t> sbuf(m.is_real() ? 0 : m.sym_stride());
  for (int len = 1; len <= k && !frontier.empty(); ++len) {
    std::vector<std::size_t> next;
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t u : frontier) {
        if (m.is_real())
          apply_generator_real(f.space, f.generators[g], m, m.real_row(u), rbuf.data());
        else
          apply_generator_symbols(f.space, f.generators[g], m, m.sym_row(u), sbuf.data());
        if (index.near(rbuf.data(), sbuf.data())) continue;
        if (b.size() >= cap) {
          on_cap(len);
          return b;
        }
        if (m.is_real())
          m.append_real(rbuf.data());
        else
          m.append_symbols(sbuf.data());
        m.row_ids.push_back(b.size());
        index.insert(m.rows() - 1);
        Word w{static_cast<std::uint16_t>(g)};
        w.insert(w.end(), b.words[u].begin(), b.words[u].end());
        b.words.push_back(std::move(w));
        b.parent.push_back(static_cast<std::int64_t>(u));
        next.push_back(b.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return b;
}

}  // namespace

// ---------------------------------------------------------------- probes

ProbeSet grid_probes(const Space& s, int n) {
  const auto* iv = std::get_if<Interval>(&s);
  if (!iv) throw PreconditionError("grid probes need an interval");
  if (n < 1) throw PreconditionError("grid needs at least one point");
  ProbeSet p{s, {}, "grid{" + std::to_string(n) + "}"};
  if (n == 1) {
    p.points.push_back(0.5 * (iv->lo + iv->hi));
    return p;
  }
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(n - 1);
    p.points.push_back(i == n - 1 ? iv->hi : iv->lo + t * (iv->hi - iv->lo));
  }
  return p;
}

ProbeSet lattice_probes(const Space& s, int per_axis) {
  if (!(std::holds_alternative<Torus>(s) || std::holds_alternative<Circle>(s)))
    throw PreconditionError("lattice probes need a torus or circle");
  if (per_axis < 1) throw PreconditionError("lattice needs at least one point per axis");
  const int dim = space_dim(s);
  long long m = per_axis;
  while (m > 1 && std::pow(static_cast<double>(m), dim) > 32768.0) --m;
  ProbeSet p{s, {}, "lattice{" + std::to_string(m) + "}"};
  long long total = 1;
  for (int d = 0; d < dim; ++d) total *= m;
  for (long long idx = 0; idx < total; ++idx) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    long long rest = idx;
    for (int d = dim - 1; d >= 0; --d) {
      v[static_cast<std::size_t>(d)] = (static_cast<double>(rest % m) + 0.5) / static_cast<double>(m);
      rest /= m;
    }
    p.points.push_back(std::move(v));
  }
  return p;
}

ProbeSet random_probes(const Space& s, int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("random probe set needs n >= 1");
  std::mt19937_64 gen(seed);
  ProbeSet p{s, {}, "random{" + std::to_string(seed) + "}"};
  for (int i = 0; i < n; ++i) {
    if (const auto* iv = std::get_if<Interval>(&s)) {
      p.points.push_back(iv->lo + u01(gen) * (iv->hi - iv->lo));
    } else if (std::holds_alternative<Torus>(s) || std::holds_alternative<Circle>(s)) {
      std::vector<double> v(static_cast<std::size_t>(space_dim(s)));
      for (double& c : v) c = u01(gen);
      p.points.push_back(std::move(v));
    } else if (const auto* eb = std::get_if<EuclideanBounded>(&s)) {
      // Uniform in the unit ball by rejection from the cube.
      std::vector<double> v(static_cast<std::size_t>(eb->dim));
      for (;;) {
        double r2 = 0.0;
        for (double& c : v) {
          c = 2.0 * u01(gen) - 1.0;
          r2 += c * c;
        }
        if (r2 <= 1.0) break;
      }
      p.points.push_back(std::move(v));
    } else if (const auto* sub = std::get_if<Subshift>(&s)) {
      std::vector<std::uint8_t> prefix(16);
      for (auto& c : prefix) c = static_cast<std::uint8_t>(1 + gen() % static_cast<std::uint64_t>(sub->alphabet));
      p.points.push_back(make_subshift_point(std::move(prefix), kPadSymbol));
    } else {
      const auto& fg = std::get<FreeGroup>(s);
      int len = static_cast<int>(gen() % 9);
      len = std::min(len, fg.max_word_len);
      std::vector<std::int16_t> letters;
      while (static_cast<int>(letters.size()) < len) {
        auto a = static_cast<std::int16_t>(1 + gen() % static_cast<std::uint64_t>(fg.rank));
        if (gen() & 1u) a = static_cast<std::int16_t>(-a);
        if (!letters.empty() && letters.back() == -a) continue;
        letters.push_back(a);
      }
      p.points.push_back(FreeWord{letters});
    }
  }
  return p;
}

ProbeSet tail_padded_probes(const Space& s, int k) {
  const auto* sub = std::get_if<Subshift>(&s);
  if (!sub) throw PreconditionError("tail-padded probes need a subshift");
  if (k < 0) throw PreconditionError("tail-padded probes need k >= 0");
  const double count = std::pow(static_cast<double>(sub->alphabet), k);
  if (count > 4'000'000.0) throw PreconditionError("too many tail-padded probes");
  ProbeSet p{s, {}, "tail_padded{" + std::to_string(k) + "}"};
  std::vector<std::uint8_t> w(static_cast<std::size_t>(k), 1);
  if (k > 0) {
    for (;;) {
      p.points.push_back(make_subshift_point(w, kPadSymbol));
      int pos = k - 1;
      while (pos >= 0 && w[static_cast<std::size_t>(pos)] == sub->alphabet) w[static_cast<std::size_t>(pos--)] = 1;
      if (pos < 0) break;
      ++w[static_cast<std::size_t>(pos)];
    }
  }
  p.points.push_back(SubshiftPoint{{}, kPadSymbol});
  return p;
}

ProbeSet basepoint_probes(const Space& s) {
  ProbeSet p{s, {}, "basepoint"};
  if (const auto* iv = std::get_if<Interval>(&s))
    p.points.push_back(iv->lo);
  else if (is_real_space(s))
    p.points.push_back(std::vector<double>(static_cast<std::size_t>(space_dim(s)), 0.0));
  else if (std::holds_alternative<Subshift>(s))
    p.points.push_back(SubshiftPoint{{}, kPadSymbol});
  else
    p.points.push_back(FreeWord{});
  return p;
}

ProbeSet extremal_probes(const Family& f, int k) {
  if (!std::holds_alternative<Interval>(f.space)) throw PreconditionError("extremal probes need an interval family");
  if (k < 0) throw PreconditionError("extremal probes need k >= 0");
  const auto& iv = std::get<Interval>(f.space);
  std::vector<PiecewiseLinear> gens;
  for (const auto& g : f.generators) {
    auto pl = to_piecewise_linear(f.space, g);
    if (!pl) throw PreconditionError("extremal probes need piecewise-linear generators");
    gens.push_back(std::move(*pl));
  }
  ProbeSet p{f.space, {}, "extremal{" + std::to_string(k) + "}"};
  std::set<double> seen;
  auto add = [&](const PiecewiseLinear& fu) {
    for (double x : {fu.x[fu.argmin()], fu.x[fu.argmax()]})
      if (seen.insert(x).second) p.points.push_back(x);
  };
  std::vector<PiecewiseLinear> layer{pl_identity(iv.lo, iv.hi)};
  if (k == 0) {
    add(layer[0]);
    return p;
  }
  for (int len = 1; len < k; ++len) {
    std::vector<PiecewiseLinear> next;
    next.reserve(layer.size() * gens.size());
    for (const auto& g : gens)
      for (const auto& fu : layer) next.push_back(compose(g, fu));
    layer = std::move(next);
  }
  for (const auto& g : gens)
    for (const auto& fu : layer) add(compose(g, fu));
  return p;
}

ProbeSet default_probes(const Space& s, int depth, std::uint64_t seed) {
  if (std::holds_alternative<Interval>(s)) return grid_probes(s, 257);
  if (std::holds_alternative<Torus>(s) || std::holds_alternative<Circle>(s)) return lattice_probes(s, 32);
  if (std::holds_alternative<Subshift>(s)) return tail_padded_probes(s, std::max(depth, 0));
  if (std::holds_alternative<FreeGroup>(s)) return basepoint_probes(s);
  return random_probes(s, 512, seed);
}

ProbeSet make_probes(const Family& f, const ProbeSpec& spec, int depth) {
  const int d = spec.depth >= 0 ? spec.depth : depth;
  if (spec.kind == "default") return default_probes(f.space, d, spec.seed);
  if (spec.kind == "grid") return grid_probes(f.space, spec.n > 0 ? spec.n : 257);
  if (spec.kind == "lattice") return lattice_probes(f.space, spec.n > 0 ? spec.n : 32);
  if (spec.kind == "random") return random_probes(f.space, spec.n > 0 ? spec.n : 512, spec.seed);
  if (spec.kind == "tail_padded") return tail_padded_probes(f.space, d);
  if (spec.kind == "basepoint") return basepoint_probes(f.space);
  if (spec.kind == "extremal") return extremal_probes(f, d);
  throw ConfigError("unknown probe kind '" + spec.kind + "'");
}

bool probes_depend_on_depth(const ProbeSpec& spec, const Space& s) {
  if (spec.depth >= 0) return false;
  if (spec.kind == "tail_padded" || spec.kind == "extremal") return true;
  return spec.kind == "default" && std::holds_alternative<Subshift>(s);
}

nlohmann::json probe_spec_to_json(const ProbeSpec& p) {
  nlohmann::json j{{"kind", p.kind}};
  if (p.n > 0) j["n"] = p.n;
  if (p.seed != 0) j["seed"] = p.seed;
  if (p.depth >= 0) j["depth"] = p.depth;
  return j;
}

ProbeSpec probe_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("probe spec must be an object");
  static const std::set<std::string> keys{"kind", "n", "seed", "depth"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in probe spec");
  ProbeSpec p;
  try {
    p.kind = j.value("kind", std::string("default"));
    p.n = j.value("n", 0);
    p.seed = j.value("seed", std::uint64_t{0});
    p.depth = j.value("depth", -1);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad probe spec: ") + e.what());
  }
  static const std::set<std::string> kinds{"default", "grid", "lattice", "random", "tail_padded", "basepoint", "extremal"};
  if (!kinds.count(p.kind)) throw ConfigError("unknown probe kind '" + p.kind + "'");
  return p;
}

// ---------------------------------------------------------------- balls

std::string strategy_name(const Strategy& s) {
  return std::holds_alternative<WordEnum>(s) ? "word_enum" : "canonical_bfs";
}

CanonicalKind canonical_kind(const Family& f) { return build_model(f).kind; }

std::size_t WordBall::count_up_to(int k) const {
  if (k < 0) return 0;
  auto it = std::upper_bound(words.begin(), words.end(), static_cast<std::size_t>(k),
                             [](std::size_t len, const Word& w) { return len < w.size(); });
  return static_cast<std::size_t>(it - words.begin());
}

std::vector<std::size_t> WordBall::layer(int k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = count_up_to(k - 1); i < count_up_to(k); ++i) out.push_back(i);
  return out;
}

std::vector<std::size_t> WordBall::ball_rows(int k) const {
  std::vector<std::size_t> out(count_up_to(k));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

WordBall enumerate(const Family& f, int k, const Strategy& strategy, std::size_t cap, const ProbeSet* dedup_probes) {
  return enumerate_impl(f, k, strategy, cap, dedup_probes, true);
}

WordBall enumerate_partial(const Family& f, int k, const Strategy& strategy, std::size_t cap,
                           const ProbeSet* dedup_probes) {
  return enumerate_impl(f, k, strategy, cap, dedup_probes, false);
}

Point apply_canonical(const Family& f, const std::vector<std::int64_t>& element, const Point& p) {
  return apply_model(f, build_model(f), element, p);
}

EvalMatrix evaluate(const Family& f, const WordBall& ball, const ProbeSet& probes, const std::vector<std::size_t>* rows,
                    int threads) {
  if (space_kind(probes.space) != space_kind(f.space)) throw SpaceMismatch("probe set belongs to another space");
  EvalMatrix m = matrix_for(f.space, probes, ball.depth);
  std::vector<std::size_t> sel;
  if (rows) {
    sel = *rows;
  } else {
    sel.resize(ball.size());
    for (std::size_t i = 0; i < sel.size(); ++i) sel[i] = i;
  }
  std::vector<std::int64_t> pos(ball.size(), -1);
  for (std::size_t j = 0; j < sel.size(); ++j) {
    if (sel[j] >= ball.size()) throw PreconditionError("row selection out of range");
    if (pos[sel[j]] >= 0) throw PreconditionError("row selection repeats a representative");
    pos[sel[j]] = static_cast<std::int64_t>(j);
  }
  m.resize_rows(sel.size());
  m.row_ids = sel;
  const std::size_t n = probes.points.size();

  if (!ball.canonical.empty()) {
    CanonicalModel model = build_model(f);
    parallel_for(sel.size(), threads, [&](std::size_t j) {
      const auto& e = ball.canonical[sel[j]];
      double* rr = m.is_real() ? m.mutable_real_row(j) : nullptr;
      std::uint8_t* sr = m.is_real() ? nullptr : m.mutable_sym_row(j);
      for (std::size_t i = 0; i < n; ++i) m.pack_point(apply_model(f, model, e, probes.points[i]), rr, sr, i);
    });
    return m;
  }

  // Word path: each row is one generator applied to its parent row, computed
  // layer by layer.  Only rows with needed children are buffered, and a
  // buffered layer is dropped once the next one is done.
  std::vector<char> need(ball.size(), 0), has_child(ball.size(), 0);
  for (std::size_t r : sel)
    for (std::int64_t x = static_cast<std::int64_t>(r); x >= 0 && !need[static_cast<std::size_t>(x)];
         x = ball.parent[static_cast<std::size_t>(x)])
      need[static_cast<std::size_t>(x)] = 1;
  for (std::size_t r = 1; r < ball.size(); ++r)
    if (need[r]) has_child[static_cast<std::size_t>(ball.parent[r])] = 1;
  const bool real = m.is_real();
  const std::size_t stride = real ? m.real_stride() : m.sym_stride();
  std::vector<std::vector<double>> rbuf(real ? ball.size() : 0);
  std::vector<std::vector<std::uint8_t>> sbuf(real ? 0 : ball.size());
  auto target_real = [&](std::size_t r) {
    if (has_child[r]) {
      rbuf[r].resize(stride);
      return rbuf[r].data();
    }
    return m.mutable_real_row(static_cast<std::size_t>(pos[r]));
  };
  auto target_sym = [&](std::size_t r) {
    if (has_child[r]) {
      sbuf[r].resize(stride);
      return sbuf[r].data();
    }
    return m.mutable_sym_row(static_cast<std::size_t>(pos[r]));
  };
  auto finish = [&](std::size_t r) {
    if (pos[r] < 0 || !has_child[r]) return;
    std::size_t j = static_cast<std::size_t>(pos[r]);
    if (real)
      std::memcpy(m.mutable_real_row(j), rbuf[r].data(), stride * sizeof(double));
    else
      std::memcpy(m.mutable_sym_row(j), sbuf[r].data(), stride);
  };
  if (real) {
    double* t = target_real(0);
    for (std::size_t i = 0; i < n; ++i) m.pack_point(probes.points[i], t, nullptr, i);
  } else {
    std::uint8_t* t = target_sym(0);
    for (std::size_t i = 0; i < n; ++i) m.pack_point(probes.points[i], nullptr, t, i);
  }
  finish(0);
  int max_len = 0;
  for (std::size_t r : sel) max_len = std::max(max_len, static_cast<int>(ball.words[r].size()));
  for (int len = 1; len <= max_len; ++len) {
    std::size_t lo = ball.count_up_to(len - 1), hi = ball.count_up_to(len);
    std::vector<std::size_t> todo;
    for (std::size_t r = lo; r < hi; ++r)
      if (need[r]) todo.push_back(r);
    parallel_for(todo.size(), threads, [&](std::size_t t) {
      std::size_t r = todo[t];
      std::size_t par = static_cast<std::size_t>(ball.parent[r]);
      const auto& g = f.generators[ball.words[r][0]];
      if (real)
        apply_generator_real(f.space, g, m, rbuf[par].data(), target_real(r));
      else
        apply_generator_symbols(f.space, g, m, sbuf[par].data(), target_sym(r));
      finish(r);
    });
    for (std::size_t r = ball.count_up_to(len - 2); r < lo; ++r) {
      if (real)
        std::vector<double>().swap(rbuf[r]);
      else
        std::vector<std::uint8_t>().swap(sbuf[r]);
    }
  }
  return m;
}

nlohmann::json word_ball_to_json(const WordBall& b) {
  nlohmann::json reps = nlohmann::json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    nlohmann::json r{{"word", b.words[i]}};
    if (!b.canonical.empty()) r["canonical"] = b.canonical[i];
    reps.push_back(std::move(r));
  }
  nlohmann::json j{{"depth", b.depth}, {"family", b.family}, {"strategy", b.strategy}, {"representatives", reps}};
  if (b.strategy == "word_enum") j["tau"] = b.tau;
  if (b.cap_exceeded_depth >= 0) j["cap_exceeded_depth"] = b.cap_exceeded_depth;
  return j;
}

std::string eval_matrix_csv(const EvalMatrix& m) {
  std::string out = "row,probe,point\n";
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t i = 0; i < m.probes(); ++i) {
      std::string s = point_to_string(m.at(r, i));
      out += std::to_string(r < m.row_ids.size() ? m.row_ids[r] : r) + "," + std::to_string(i) + ",\"" + s + "\"\n";
    }
  return out;
}

}  // namespace depthlab
