#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "depthlab/metric_space.hpp"
#include "depthlab/simd/kernels.hpp"

namespace depthlab {

enum class MetricTag { dS, dPmax };

std::string metric_name(MetricTag m);
MetricTag metric_from_name(const std::string& s);

// Images of representatives (rows) at probe points (columns), stored packed:
// real spaces keep `dim` blocks of `probes` doubles per row, symbolic spaces
// keep one fixed-width byte cell per probe.
//
// Subshift cell: symbols x_0..x_{W-1}, then the tail symbol, zero padded.
// Free-group cell: encoded letters (a_i -> i, a_i^-1 -> rank+i), zero padded,
// word length in the last byte.
class EvalMatrix {
 public:
  EvalMatrix() = default;
  // `symbol_width` is the longest subshift prefix or free-group word a cell must hold.
  EvalMatrix(Space space, std::size_t probes, std::size_t symbol_width = 0);

  static EvalMatrix from_points(const Space& space, const std::vector<Point>& points);

  const Space& space() const { return space_; }
  std::size_t rows() const { return rows_; }
  std::size_t probes() const { return probes_; }
  bool is_real() const { return real_; }
  std::size_t dim() const { return dim_; }
  std::size_t cell() const { return cell_; }
  std::size_t symbol_width() const { return width_; }
  std::size_t real_stride() const { return dim_ * probes_; }
  std::size_t sym_stride() const { return cell_ * probes_; }

  Point at(std::size_t r, std::size_t i) const;
  std::vector<Point> row_points(std::size_t r) const;

  void reserve(std::size_t rows);
  void append_points(const std::vector<Point>& points);
  void append_real(const double* row);
  void append_symbols(const std::uint8_t* row);
  // Copies of the selected rows, keeping row_ids aligned.
  EvalMatrix subset(const std::vector<std::size_t>& rows) const;

  const double* real_row(std::size_t r) const { return real_data_.data() + r * real_stride(); }
  const std::uint8_t* sym_row(std::size_t r) const { return sym_data_.data() + r * sym_stride(); }
  double* mutable_real_row(std::size_t r) { return real_data_.data() + r * real_stride(); }
  std::uint8_t* mutable_sym_row(std::size_t r) { return sym_data_.data() + r * sym_stride(); }
  // Grows or shrinks to `rows` rows; new rows are zero filled.
  void resize_rows(std::size_t rows);

  void pack_point(const Point& p, double* real_row, std::uint8_t* sym_row, std::size_t probe) const;
  Point unpack_point(const double* real_row, const std::uint8_t* sym_row, std::size_t probe) const;

  simd::RealMetric real_metric() const { return real_metric_; }
  bool is_free_group() const { return free_; }
  // theta^j for subshift mismatch index j.
  double theta_pow(std::size_t j) const { return theta_pow_[j]; }
  std::uint8_t encode_letter(std::int16_t letter) const;
  std::int16_t decode_letter(std::uint8_t code) const;

  // Representative index of each row.
  std::vector<std::size_t> row_ids;

 private:
  Space space_;
  std::size_t rows_ = 0;
  std::size_t probes_ = 0;
  bool real_ = true;
  bool free_ = false;
  std::size_t dim_ = 0;
  std::size_t width_ = 0;
  std::size_t cell_ = 0;
  int rank_ = 0;
  simd::RealMetric real_metric_ = simd::RealMetric::Euclid;
  std::vector<double> theta_pow_;
  std::vector<double> real_data_;
  std::vector<std::uint8_t> sym_data_;
};

inline constexpr double kNoStop = std::numeric_limits<double>::infinity();

// Exact value whenever it is below `stop`; otherwise some value >= stop.
double row_distance(const EvalMatrix& m, MetricTag tag, std::size_t a, std::size_t b, double stop = kNoStop);
double d_S(const EvalMatrix& m, std::size_t a, std::size_t b);
double d_P_max(const EvalMatrix& m, std::size_t a, std::size_t b);

// Same distances between a row of `m` and a packed row with the same layout.
double packed_distance(const EvalMatrix& m, MetricTag tag, const double* ra, const std::uint8_t* sa, const double* rb,
                       const std::uint8_t* sb, double stop = kNoStop);

// Distance between the two images at probe i.
double probe_distance(const EvalMatrix& m, const double* ra, const std::uint8_t* sa, const double* rb,
                      const std::uint8_t* sb, std::size_t i);

}  // namespace depthlab
