#include "depthlab/eval_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "depthlab/errors.hpp"
#include "simd/kernels_internal.hpp"

namespace depthlab {

std::string metric_name(MetricTag m) { return m == MetricTag::dS ? "d_S" : "d_P_max"; }

MetricTag metric_from_name(const std::string& s) {
  if (s == "d_S" || s == "dS") return MetricTag::dS;
  if (s == "d_P_max" || s == "dPmax") return MetricTag::dPmax;
  throw ConfigError("unknown metric '" + s + "' (expected d_S or d_P_max)");
}

EvalMatrix::EvalMatrix(Space space, std::size_t probes, std::size_t symbol_width)
    : space_(std::move(space)), probes_(probes) {
  validate_space(space_);
  if (probes_ == 0) throw PreconditionError("an evaluation matrix needs at least one probe");
  dim_ = static_cast<std::size_t>(space_dim(space_));
  real_ = dim_ > 0;
  if (real_) {
    if (std::holds_alternative<Torus>(space_) || std::holds_alternative<Circle>(space_))
      real_metric_ = simd::RealMetric::Circular;
    else if (std::holds_alternative<EuclideanBounded>(space_))
      real_metric_ = simd::RealMetric::Capped;
    else
      real_metric_ = simd::RealMetric::Euclid;
    return;
  }
  width_ = std::max<std::size_t>(symbol_width, 1);
  if (const auto* sub = std::get_if<Subshift>(&space_)) {
    cell_ = (width_ + 1 + 15) / 16 * 16;
    theta_pow_.resize(cell_ + 1);
    for (std::size_t j = 0; j <= cell_; ++j) theta_pow_[j] = std::pow(sub->theta, static_cast<double>(j));
  } else {
    const auto& fg = std::get<FreeGroup>(space_);
    free_ = true;
    rank_ = fg.rank;
    width_ = std::min<std::size_t>(width_, static_cast<std::size_t>(fg.max_word_len));
    if (width_ > 255) throw PreconditionError("free-group cells hold at most 255 letters");
    cell_ = (width_ + 1 + 15) / 16 * 16;
  }
}

EvalMatrix EvalMatrix::from_points(const Space& space, const std::vector<Point>& points) {
  std::size_t width = 1;
  for (const auto& p : points) {
    if (const auto* s = std::get_if<SubshiftPoint>(&p)) width = std::max(width, s->prefix.size());
    if (const auto* w = std::get_if<FreeWord>(&p)) width = std::max(width, w->letters.size());
  }
  EvalMatrix m(space, 1, width);
  m.reserve(points.size());
  for (const auto& p : points) {
    m.append_points({p});
    m.row_ids.push_back(m.rows() - 1);
  }
  return m;
}

std::uint8_t EvalMatrix::encode_letter(std::int16_t letter) const {
  return static_cast<std::uint8_t>(letter > 0 ? letter : rank_ - letter);
}

std::int16_t EvalMatrix::decode_letter(std::uint8_t code) const {
  return static_cast<std::int16_t>(code <= rank_ ? code : -(code - rank_));
}

void EvalMatrix::pack_point(const Point& p, double* rrow, std::uint8_t* srow, std::size_t i) const {
  check_point(space_, p);
  if (real_) {
    if (const auto* x = std::get_if<double>(&p)) {
      rrow[i] = *x;
    } else {
      const auto& v = std::get<std::vector<double>>(p);
      for (std::size_t c = 0; c < dim_; ++c) rrow[c * probes_ + i] = v[c];
    }
    return;
  }
  std::uint8_t* cellp = srow + i * cell_;
  std::memset(cellp, 0, cell_);
  if (!free_) {
    const auto& s = std::get<SubshiftPoint>(p);
    if (s.prefix.size() > width_) throw PreconditionError("subshift prefix longer than the matrix cell");
    for (std::size_t j = 0; j < width_; ++j) cellp[j] = subshift_symbol(s, j);
    cellp[width_] = s.tail;
  } else {
    const auto& w = std::get<FreeWord>(p).letters;
    if (w.size() > width_) throw WordOverflow("free-group word longer than the matrix cell");
    for (std::size_t j = 0; j < w.size(); ++j) cellp[j] = encode_letter(w[j]);
    cellp[cell_ - 1] = static_cast<std::uint8_t>(w.size());
  }
}

Point EvalMatrix::unpack_point(const double* rrow, const std::uint8_t* srow, std::size_t i) const {
  if (real_) {
    if (std::holds_alternative<Interval>(space_)) return rrow[i];
    std::vector<double> v(dim_);
    for (std::size_t c = 0; c < dim_; ++c) v[c] = rrow[c * probes_ + i];
    return v;
  }
  const std::uint8_t* cellp = srow + i * cell_;
  if (!free_) {
    std::vector<std::uint8_t> prefix(cellp, cellp + width_);
    return make_subshift_point(std::move(prefix), cellp[width_]);
  }
  FreeWord w;
  std::size_t len = cellp[cell_ - 1];
  for (std::size_t j = 0; j < len; ++j) w.letters.push_back(decode_letter(cellp[j]));
  return w;
}

Point EvalMatrix::at(std::size_t r, std::size_t i) const {
  if (r >= rows_ || i >= probes_) throw PreconditionError("evaluation matrix index out of range");
  return unpack_point(real_ ? real_row(r) : nullptr, real_ ? nullptr : sym_row(r), i);
}

std::vector<Point> EvalMatrix::row_points(std::size_t r) const {
  std::vector<Point> out;
  out.reserve(probes_);
  for (std::size_t i = 0; i < probes_; ++i) out.push_back(at(r, i));
  return out;
}

void EvalMatrix::reserve(std::size_t rows) {
  if (real_)
    real_data_.reserve(rows * real_stride());
  else
    sym_data_.reserve(rows * sym_stride());
}

void EvalMatrix::append_points(const std::vector<Point>& points) {
  if (points.size() != probes_) throw PreconditionError("row has the wrong number of probes");
  if (real_) {
    std::vector<double> row(real_stride());
    for (std::size_t i = 0; i < probes_; ++i) pack_point(points[i], row.data(), nullptr, i);
    append_real(row.data());
  } else {
    std::vector<std::uint8_t> row(sym_stride());
    for (std::size_t i = 0; i < probes_; ++i) pack_point(points[i], nullptr, row.data(), i);
    append_symbols(row.data());
  }
}

void EvalMatrix::resize_rows(std::size_t rows) {
  if (real_)
    real_data_.resize(rows * real_stride());
  else
    sym_data_.resize(rows * sym_stride());
  rows_ = rows;
}

void EvalMatrix::append_real(const double* row) {
  real_data_.insert(real_data_.end(), row, row + real_stride());
  ++rows_;
}

void EvalMatrix::append_symbols(const std::uint8_t* row) {
  sym_data_.insert(sym_data_.end(), row, row + sym_stride());
  ++rows_;
}

EvalMatrix EvalMatrix::subset(const std::vector<std::size_t>& rows) const {
  EvalMatrix out = *this;
  out.rows_ = 0;
  out.real_data_.clear();
  out.sym_data_.clear();
  out.row_ids.clear();
  out.real_data_.shrink_to_fit();
  out.sym_data_.shrink_to_fit();
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= rows_) throw PreconditionError("subset row out of range");
    if (real_)
      out.append_real(real_row(r));
    else
      out.append_symbols(sym_row(r));
    out.row_ids.push_back(r < row_ids.size() ? row_ids[r] : r);
  }
  return out;
}

namespace {

constexpr double kStopSlack = 1.0 + 1e-12;

double symbolic_distance(const EvalMatrix& m, MetricTag tag, const std::uint8_t* a, const std::uint8_t* b,
                         double stop) {
  const auto& k = simd::active_kernels();
  const std::size_t n = m.probes(), cell = m.cell(), width = m.symbol_width();
  const double stop_sum = std::isinf(stop) ? stop : static_cast<double>(n) * stop * stop * kStopSlack;
  std::uint32_t fm[simd::kEarlyExitBlock];
  double best = 0.0, sum = 0.0;
  for (std::size_t i0 = 0; i0 < n; i0 += simd::kEarlyExitBlock) {
    std::size_t cnt = std::min(simd::kEarlyExitBlock, n - i0);
    k.cell_mismatch(a + i0 * cell, b + i0 * cell, cnt, cell, fm);
    for (std::size_t j = 0; j < cnt; ++j) {
      double d;
      if (!m.is_free_group()) {
        d = fm[j] > width ? 0.0 : m.theta_pow(fm[j]);
      } else if (fm[j] >= width) {
        d = 0.0;
      } else {
        std::size_t la = a[(i0 + j) * cell + cell - 1], lb = b[(i0 + j) * cell + cell - 1];
        std::size_t lcp = std::min<std::size_t>({fm[j], la, lb});
        d = static_cast<double>(la + lb - 2 * lcp);
      }
      if (tag == MetricTag::dPmax)
        best = std::max(best, d);
      else
        sum += d * d;
    }
    if (tag == MetricTag::dPmax && best >= stop) return best;
    if (tag == MetricTag::dS && sum > stop_sum) return std::sqrt(sum / static_cast<double>(n));
  }
  return tag == MetricTag::dPmax ? best : std::sqrt(sum / static_cast<double>(n));
}

double real_distance(const EvalMatrix& m, MetricTag tag, const double* a, const double* b, double stop) {
  const auto& k = simd::active_kernels();
  const std::size_t n = m.probes();
  if (tag == MetricTag::dS) {
    double stop_sum = std::isinf(stop) ? stop : static_cast<double>(n) * stop * stop * kStopSlack;
    return std::sqrt(k.real_sum(m.real_metric(), a, b, n, m.dim(), stop_sum) / static_cast<double>(n));
  }
  double stop_sq = std::isinf(stop) ? stop : stop * stop * kStopSlack;
  return std::sqrt(k.real_max(m.real_metric(), a, b, n, m.dim(), stop_sq));
}

}  // namespace

double packed_distance(const EvalMatrix& m, MetricTag tag, const double* ra, const std::uint8_t* sa, const double* rb,
                       const std::uint8_t* sb, double stop) {
  return m.is_real() ? real_distance(m, tag, ra, rb, stop) : symbolic_distance(m, tag, sa, sb, stop);
}

double probe_distance(const EvalMatrix& m, const double* ra, const std::uint8_t* sa, const double* rb,
                      const std::uint8_t* sb, std::size_t i) {
  if (m.is_real()) return std::sqrt(simd::detail::probe_sq(m.real_metric(), ra, rb, m.probes(), m.dim(), i));
  const std::size_t cell = m.cell(), width = m.symbol_width();
  const std::uint8_t* a = sa + i * cell;
  const std::uint8_t* b = sb + i * cell;
  std::size_t fm = 0;
  while (fm < cell && a[fm] == b[fm]) ++fm;
  if (!m.is_free_group()) return fm > width ? 0.0 : m.theta_pow(fm);
  if (fm >= width) return 0.0;
  std::size_t la = a[cell - 1], lb = b[cell - 1];
  std::size_t lcp = std::min<std::size_t>({fm, la, lb});
  return static_cast<double>(la + lb - 2 * lcp);
}

double row_distance(const EvalMatrix& m, MetricTag tag, std::size_t a, std::size_t b, double stop) {
  if (a >= m.rows() || b >= m.rows()) throw PreconditionError("row index out of range");
  if (m.is_real()) return real_distance(m, tag, m.real_row(a), m.real_row(b), stop);
  return symbolic_distance(m, tag, m.sym_row(a), m.sym_row(b), stop);
}

double d_S(const EvalMatrix& m, std::size_t a, std::size_t b) { return row_distance(m, MetricTag::dS, a, b); }

double d_P_max(const EvalMatrix& m, std::size_t a, std::size_t b) { return row_distance(m, MetricTag::dPmax, a, b); }

}  // namespace depthlab
