#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace depthlab {

// Values h(X_i) of a finite real-valued class: one row per hypothesis, n columns.
class FiniteClassValues {
 public:
  FiniteClassValues(std::size_t n) : n_(n) {}
  FiniteClassValues(const std::vector<std::vector<double>>& rows);

  void add_row(const std::vector<double>& row);
  void add_row(const double* row);
  std::size_t n() const { return n_; }
  std::size_t size() const { return n_ == 0 ? 0 : data_.size() / n_; }
  const double* row(std::size_t h) const { return data_.data() + h * n_; }
  // max |entry|
  double bound() const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct RademacherEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  bool exact = false;
};

inline constexpr std::size_t kDefaultDraws = 4096;
inline constexpr std::size_t kExactSignLimit = 12;

// Sign vectors are drawn from per-draw counter streams, so the estimate depends
// only on (seed, draws).
RademacherEstimate empirical_rademacher(const FiniteClassValues& v, std::size_t draws, std::uint64_t seed,
                                        int threads = 1);
// Average over all 2^n sign vectors (n <= 24).
double exact_rademacher(const FiniteClassValues& v);
// Exact when n <= kExactSignLimit, Monte Carlo otherwise.
RademacherEstimate rademacher_complexity(const FiniteClassValues& v, std::size_t draws, std::uint64_t seed,
                                         int threads = 1);

double massart_bound(double b, std::size_t class_size, std::size_t n);
double uniform_deviation_bound(double r_hat, double b, double delta, std::size_t n, double beta_loss);
double hidden_output_bound(double r_hat_h, double dudley_term);
double two_integral_bound(double entropy_h, double entropy_f, double lipschitz, std::size_t n, double b);

struct RademacherBounds {
  double massart = 0.0;
  double hidden_output = 0.0;
  double two_integral = 0.0;
};

nlohmann::json rademacher_report(const RademacherEstimate& e, const RademacherBounds& b);

}  // namespace depthlab
